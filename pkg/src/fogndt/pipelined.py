"""Achievable NDT, lower bound and gap for pipelined fronthaul-edge delivery.

Pipelined operation runs fronthaul and wireless transmissions concurrently
via block-Markov scheduling, so a scheme's NDT is the maximum of its two
phase NDTs rather than their sum.  The block-Markov overhead factor
B/(B-1) is taken in the limit of many blocks; the finite-B behaviour is
exercised separately by the verification module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .envelope import lower_convex_hull
from .model import (
    InfeasibleConfigError,
    PiecewiseLinearNdt,
    SystemConfig,
    max_multiplicity,
    pipelined_bound_multiplicity,
    pipelined_cache_threshold,
    pipelined_multiplicity,
)
from .serial import achievable_lce, serial_lower_bound


def _fronthaul_limited_threshold(cfg: SystemConfig) -> Fraction:
    """Cache level below which a single-multiplicity pipeline is fronthaul bound."""
    return max(1 - Fraction(cfg.k_t) * cfg.r / cfg.n_t, Fraction(0))


def _edge_term(m: int, cfg: SystemConfig) -> Fraction:
    return max(Fraction(cfg.k_r, m * cfg.n_t), Fraction(1))


def _multiplicity_breakpoints(cfg: SystemConfig) -> list[Fraction]:
    """Cache levels (as mu*k_t) where the pipelined multiplicity steps up."""
    c = Fraction(cfg.k_t) * cfg.r / cfg.n_t
    return [i - c / i for i in range(1, max_multiplicity(cfg) + 1)]


def pipelined_envelope(cfg: SystemConfig) -> PiecewiseLinearNdt:
    """Envelope of the edge-limited pipelined NDT over the balanced breakpoints.

    Valid on the cache range where the pipeline is not purely fronthaul
    bound; ``achievable_pipelined`` handles the fronthaul-bound branch.
    """
    left = _fronthaul_limited_threshold(cfg)
    k_t = Fraction(cfg.k_t)
    xs = {left, k_t}
    for s in _multiplicity_breakpoints(cfg):
        if left < s < k_t:
            xs.add(s)
    points = []
    for x in sorted(xs):
        m = pipelined_multiplicity(replace(cfg, mu=x / cfg.k_t))
        points.append((x / cfg.k_t, _edge_term(m, cfg)))
    return PiecewiseLinearNdt(tuple(lower_convex_hull(points)))


def achievable_pipelined(cfg: SystemConfig) -> Fraction:
    """Achievable pipelined NDT (post-envelope, exact rational)."""
    cfg.require_feasible()
    thr = _fronthaul_limited_threshold(cfg)
    if cfg.mu_kt < thr:
        # fronthaul bound: multiplicity 1, fractional cache shaves the transfer
        return max(Fraction(cfg.k_r) * (1 - cfg.mu_kt) / (cfg.k_t * cfg.r), Fraction(1))
    return pipelined_envelope(cfg).evaluate(cfg.mu)


def lower_bound_pipelined(cfg: SystemConfig) -> float:
    """Lower bound on the minimum pipelined NDT; +inf when infeasible."""
    mu_kt = cfg.mu_kt
    if mu_kt >= _fronthaul_limited_threshold(cfg):
        m = pipelined_bound_multiplicity(cfg)
        return max(cfg.k_r / (m * cfg.n_t), 1.0)
    if cfg.r == 0:
        return math.inf
    return max(float(Fraction(cfg.k_r) * (1 - mu_kt) / (cfg.k_t * cfg.r)), 1.0)


def exact_regime_pipelined(cfg: SystemConfig) -> Optional[Union[Fraction, float]]:
    """Minimum pipelined NDT where it is known exactly, else None.

    Exactness holds when the pipeline is fronthaul bound, when the cache size
    sits on a balanced-multiplicity breakpoint, and beyond the last
    breakpoint.  Membership is decided in exact rational arithmetic.
    """
    mu_kt = cfg.mu_kt
    breaks = _multiplicity_breakpoints(cfg)
    for i, s in enumerate(breaks, start=1):
        if mu_kt == s:
            return _edge_term(i, cfg)
    if mu_kt > pipelined_cache_threshold(cfg):
        return _edge_term(max_multiplicity(cfg), cfg)
    if mu_kt <= 1 - Fraction(cfg.k_t) * cfg.r / cfg.n_t:
        if cfg.r == 0:
            # mu_kt == 1 is the breakpoint i=1, handled above; below it nothing
            # can be delivered, which is an exactly known (infinite) optimum
            return math.inf
        return max(Fraction(cfg.k_r) * (1 - mu_kt) / (cfg.k_t * cfg.r), Fraction(1))
    return None


def gap_pipelined(cfg: SystemConfig) -> float:
    """Ratio of the pipelined envelope to the pipelined lower bound (<= 2)."""
    lb = lower_bound_pipelined(cfg)
    if not math.isfinite(lb):
        raise InfeasibleConfigError("gap undefined for infeasible configurations")
    return float(achievable_pipelined(cfg)) / lb


def serial_pipelined_relations(cfg: SystemConfig) -> dict[str, float]:
    """Cross-mode sanity quantities: pipelining helps, but at most by half.

    Returns the four values whose pairwise comparisons the callers assert:
    pipelined achievable <= serial achievable, and pipelined lower bound >=
    half the serial lower bound.
    """
    return {
        "serial_achievable": float(achievable_lce(cfg)),
        "pipelined_achievable": float(achievable_pipelined(cfg)),
        "serial_lower_bound": serial_lower_bound(cfg),
        "pipelined_lower_bound": lower_bound_pipelined(cfg),
    }


@dataclass(frozen=True)
class PipelinedBoundReport:
    """Achievable / lower-bound summary for one configuration in pipelined mode."""

    achievable: Fraction
    lower_bound: float
    exact: Optional[Union[Fraction, float]]
    gap_ratio: float
    multiplicity_used: int


def pipelined_report(cfg: SystemConfig) -> PipelinedBoundReport:
    ach = achievable_pipelined(cfg)
    lb = lower_bound_pipelined(cfg)
    return PipelinedBoundReport(
        achievable=ach,
        lower_bound=lb,
        exact=exact_regime_pipelined(cfg),
        gap_ratio=float(ach) / lb,
        multiplicity_used=pipelined_multiplicity(cfg),
    )
