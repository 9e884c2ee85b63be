"""Achievable NDT, lower bound and optimality gap for serial fronthaul-edge delivery.

Achievable values are exact rationals; the lower bound carries a square root
and is evaluated in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .envelope import lower_convex_hull
from .model import (
    InfeasibleConfigError,
    NdtBreakdown,
    PiecewiseLinearNdt,
    Regime,
    SystemConfig,
    fronthaul_multiplicity,
    fronthaul_rate_threshold,
    integer_cache_grid,
    max_multiplicity,
    serial_bound_multiplicity,
    serial_multiplicity,
    served_users,
)


def edge_ndt(m: int, cfg: SystemConfig) -> Fraction:
    """Wireless-phase NDT of a scheme with multiplicity ``m``."""
    return Fraction(cfg.k_r, served_users(m, cfg))


def fronthaul_ndt(m_extra: int, cfg: SystemConfig) -> Fraction:
    """Fronthaul-phase NDT when ``m_extra`` multiplicity units come from the cloud."""
    if m_extra < 0:
        raise ValueError("m_extra must be >= 0")
    if m_extra == 0:
        return Fraction(0)
    if cfg.r == 0:
        raise InfeasibleConfigError("fronthaul transfer requested with r = 0")
    return Fraction(cfg.k_r * m_extra) / (cfg.k_t * cfg.r)


def achievable_raw(cfg: SystemConfig) -> NdtBreakdown:
    """Pre-envelope achievable NDT of the synthesized scheme at this exact cfg."""
    cfg.require_feasible()
    m = serial_multiplicity(cfg)
    cached = math.floor(cfg.mu_kt)
    extra = max(m - cached, 0)
    edge_only = cfg.mu_kt >= fronthaul_multiplicity(cfg)
    if edge_only:
        extra = 0
    regime = Regime.EDGE_ONLY if edge_only else Regime.CLOUD_AND_EDGE
    return NdtBreakdown.serial(fronthaul_ndt(extra, cfg), edge_ndt(m, cfg), regime, m)


def lce_curve(cfg: SystemConfig) -> PiecewiseLinearNdt:
    """Time-sharing envelope of the achievable NDT over mu at fixed (k_t, k_r, n_t, r).

    The raw achievable NDT is constant between consecutive integer values of
    mu * k_t, so hulling the integer grid gives the exact envelope.  The grid
    starts at mu * k_t = 1 when r = 0 (smaller caches are infeasible there).
    """
    points = []
    for mu in integer_cache_grid(cfg):
        b = achievable_raw(replace(cfg, mu=mu))
        points.append((mu, b.delta))
    return PiecewiseLinearNdt(tuple(lower_convex_hull(points)))


def achievable_lce(cfg: SystemConfig) -> Fraction:
    """Post-envelope achievable NDT at cfg.mu (exact rational)."""
    cfg.require_feasible()
    return lce_curve(cfg).evaluate(cfg.mu)


def serial_lower_bound(cfg: SystemConfig) -> float:
    """Lower bound on the minimum serial NDT; +inf when no finite NDT exists."""
    if not cfg.feasible:
        return math.inf
    mu_kt = float(cfg.mu_kt)
    m_lb = serial_bound_multiplicity(cfg)
    if mu_kt < m_lb:
        value = (cfg.k_r * (m_lb - mu_kt)) / (cfg.k_t * float(cfg.r)) \
            + cfg.k_r / (m_lb * cfg.n_t)
        return max(value, 1.0)
    return max(cfg.k_r / (mu_kt * cfg.n_t), 1.0)


def exact_regime_serial(cfg: SystemConfig) -> Optional[Union[Fraction, float]]:
    """Minimum serial NDT where it is known exactly, else None.

    Two regimes are covered: small caches with weak fronthaul
    (mu*k_t <= 1 and r <= n_t/k_t, additionally requiring n_t <= k_r), and
    cache capacities at the integer grid above the fronthaul multiplicity or
    beyond the maximum multiplicity.  Values are exact rationals except for
    the infeasible corner, which reports +inf.
    """
    mu_kt = cfg.mu_kt
    m_cap = max_multiplicity(cfg)
    m_r = fronthaul_multiplicity(cfg)
    # integer cache grid above the fronthaul multiplicity, or beyond m_cap
    in_integer_band = (
        mu_kt.denominator == 1 and m_r + 1 <= mu_kt <= m_cap
    )
    if in_integer_band or m_cap < mu_kt <= cfg.k_t:
        return max(Fraction(cfg.k_r) / (mu_kt * cfg.n_t), Fraction(1))
    if cfg.n_t <= cfg.k_r and mu_kt <= 1 and cfg.r <= Fraction(cfg.n_t, cfg.k_t):
        if cfg.r == 0:
            if mu_kt < 1:
                return math.inf
            return max(Fraction(cfg.k_r, cfg.n_t), Fraction(1))
        value = Fraction(cfg.k_r) * (1 - mu_kt) / (cfg.k_t * cfg.r) \
            + Fraction(cfg.k_r, cfg.n_t)
        return max(value, Fraction(1))
    return None


def min_total_ndt_over_multiplicity(cfg: SystemConfig) -> tuple[int, Fraction]:
    """Exhaustive best (multiplicity, NDT) over integer multiplicities.

    Diagnostic only: the headline achievable numbers always use
    ``serial_multiplicity``, whose nearest-integer choice may be slightly off
    this exhaustive optimum.
    """
    cfg.require_feasible()
    cached = math.floor(cfg.mu_kt)
    best: tuple[int, Fraction] | None = None
    for m in range(1, max_multiplicity(cfg) + 1):
        extra = max(m - cached, 0)
        if extra > 0 and cfg.r == 0:
            continue
        total = fronthaul_ndt(extra, cfg) + edge_ndt(m, cfg)
        if best is None or total < best[1]:
            best = (m, total)
    assert best is not None
    return best


def gap_serial(cfg: SystemConfig) -> float:
    """Ratio of the achievable envelope to the lower bound (contract: <= 1.5)."""
    lb = serial_lower_bound(cfg)
    if not math.isfinite(lb):
        raise InfeasibleConfigError("gap undefined for infeasible configurations")
    return float(achievable_lce(cfg)) / lb


@dataclass(frozen=True)
class SerialBoundReport:
    """Achievable / lower-bound summary for one configuration in serial mode."""

    achievable: Fraction
    achievable_raw: NdtBreakdown
    lower_bound: float
    exact: Optional[Union[Fraction, float]]
    gap_ratio: float


def serial_report(cfg: SystemConfig) -> SerialBoundReport:
    raw = achievable_raw(cfg)
    ach = achievable_lce(cfg)
    lb = serial_lower_bound(cfg)
    return SerialBoundReport(
        achievable=ach,
        achievable_raw=raw,
        lower_bound=lb,
        exact=exact_regime_serial(cfg),
        gap_ratio=float(ach) / lb,
    )
