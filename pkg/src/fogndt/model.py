"""Core domain types and multiplicity arithmetic for cache-aided fog-RAN delivery.

All cache sizes and fronthaul rates are kept as exact rationals so that
floor/threshold logic never suffers from floating-point rounding.  Values
that involve square roots (the real-valued bound multiplicities) are the
only place doubles appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Iterable, Union

RationalLike = Union[int, str, float, Fraction]

#: comparison tolerance for real-valued (square-root carrying) bounds
REAL_TOL = 1e-9


class InfeasibleConfigError(ValueError):
    """Raised when a configuration cannot support any finite delivery time."""


def as_fraction(x: RationalLike) -> Fraction:
    """Convert a user-supplied number to an exact Fraction.

    Floats are interpreted through their decimal literal (``0.1 -> 1/10``),
    not their binary expansion, so that config values behave the way they
    were typed.  Strings accept both ``"3/4"`` and ``"0.75"``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class SystemConfig:
    """One fog-RAN instance.

    k_t:     number of edge nodes (>= 1)
    k_r:     number of single-antenna users (>= 1)
    n_t:     antennas per edge node (>= 1)
    n_files: library size (>= k_r so worst-case distinct demands exist)
    mu:      fractional cache size per edge node, in [0, 1]
    r:       fronthaul-to-wireless capacity ratio, >= 0
    """

    k_t: int
    k_r: int
    n_t: int
    n_files: int
    mu: Fraction
    r: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", as_fraction(self.mu))
        object.__setattr__(self, "r", as_fraction(self.r))
        if self.k_t < 1 or self.k_r < 1 or self.n_t < 1:
            raise ValueError("k_t, k_r and n_t must all be >= 1")
        if self.n_files < self.k_r:
            raise ValueError("library must hold at least k_r files")
        if not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")
        if self.r < 0:
            raise ValueError("r must be >= 0")

    @property
    def mu_kt(self) -> Fraction:
        """Aggregate per-file cache capacity across all edge nodes."""
        return self.mu * self.k_t

    @property
    def feasible(self) -> bool:
        """Whether any finite delivery time exists.

        With zero fronthaul rate the caches alone must be able to hold one
        full copy of every file across the edge nodes.
        """
        return self.r > 0 or self.mu_kt >= 1

    def require_feasible(self) -> None:
        if not self.feasible:
            raise InfeasibleConfigError(
                f"r = 0 requires mu * k_t >= 1 (got mu * k_t = {self.mu_kt})"
            )


class Regime(Enum):
    """Whether a scheme moves any content over the fronthaul."""

    EDGE_ONLY = "edge_only"
    CLOUD_AND_EDGE = "cloud_and_edge"


@dataclass(frozen=True)
class NdtBreakdown:
    """Exact fronthaul/edge/total normalized delivery times.

    ``delta`` is ``delta_f + delta_e`` in serial mode and
    ``max(delta_f, delta_e)`` in pipelined mode.
    """

    delta_f: Fraction
    delta_e: Fraction
    delta: Fraction
    regime: Regime
    multiplicity_used: int
    mode: str = "serial"

    @classmethod
    def serial(cls, delta_f: Fraction, delta_e: Fraction, regime: Regime,
               multiplicity_used: int) -> "NdtBreakdown":
        return cls(delta_f, delta_e, delta_f + delta_e, regime, multiplicity_used, "serial")

    @classmethod
    def pipelined(cls, delta_f: Fraction, delta_e: Fraction, regime: Regime,
                  multiplicity_used: int) -> "NdtBreakdown":
        return cls(delta_f, delta_e, max(delta_f, delta_e), regime,
                   multiplicity_used, "pipelined")


@dataclass(frozen=True)
class PiecewiseLinearNdt:
    """Lower convex envelope of an NDT curve over the cache size mu.

    Breakpoints are (mu, ndt) pairs with mu strictly increasing; the induced
    function is convex and non-increasing in mu.  Evaluation interpolates
    exactly in rational arithmetic.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        mus = [p[0] for p in self.breakpoints]
        if any(b <= a for a, b in zip(mus, mus[1:])):
            raise ValueError("breakpoints must be strictly increasing in mu")

    @property
    def mu_min(self) -> Fraction:
        return self.breakpoints[0][0]

    @property
    def mu_max(self) -> Fraction:
        return self.breakpoints[-1][0]

    def evaluate(self, mu: RationalLike) -> Fraction:
        """Exact value of the envelope at ``mu`` (must lie inside the domain)."""
        x = as_fraction(mu)
        if not self.mu_min <= x <= self.mu_max:
            raise InfeasibleConfigError(
                f"mu = {x} outside envelope domain [{self.mu_min}, {self.mu_max}]"
            )
        pts = self.breakpoints
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[-1][1]


# ---------------------------------------------------------------------------
# multiplicity functions
# ---------------------------------------------------------------------------

def served_users(m: int, cfg: SystemConfig) -> int:
    """Users served simultaneously by a cooperating cluster of ``m`` edge nodes."""
    if m < 1:
        raise ValueError("multiplicity must be >= 1")
    return min(m * cfg.n_t, cfg.k_r)


def max_multiplicity(cfg: SystemConfig) -> int:
    """Largest multiplicity that can still improve delivery."""
    return min(cfg.k_t, -(-cfg.k_r // cfg.n_t))


def fronthaul_rate_threshold(cfg: SystemConfig) -> Fraction:
    """Fronthaul rate beyond which the maximum multiplicity is always used."""
    m = max_multiplicity(cfg)
    return Fraction(cfg.n_t * m * m, cfg.k_t)


def nearest_positive_integer(q: Fraction) -> int:
    """Nearest positive integer to sqrt(q), computed exactly for rational q >= 0.

    Half-integer ties round up (the rounding convention is isolated here; no
    other code embeds a tie rule).  Results below 1 are clamped to 1.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    a, b = q.numerator, q.denominator
    # floor(2*sqrt(q)) = isqrt(4ab) // b; round-half-up is then (t + 1) // 2
    t = isqrt(4 * a * b) // b
    return max((t + 1) // 2, 1)


def fronthaul_multiplicity(cfg: SystemConfig) -> int:
    """Multiplicity targeted when content reaches the edge via fronthaul only."""
    if cfg.r >= fronthaul_rate_threshold(cfg):
        return max_multiplicity(cfg)
    return nearest_positive_integer(Fraction(cfg.k_t) * cfg.r / cfg.n_t)


def cache_multiplicity(cfg: SystemConfig) -> int:
    """Multiplicity guaranteed by edge caches alone."""
    return min(math.floor(cfg.mu_kt), max_multiplicity(cfg))


def serial_multiplicity(cfg: SystemConfig) -> int:
    """Multiplicity adopted under serial fronthaul-then-edge delivery."""
    m_r = fronthaul_multiplicity(cfg)
    m_cap = max_multiplicity(cfg)
    if cfg.mu_kt < m_r:
        return m_r
    if cfg.mu_kt <= m_cap:
        return math.floor(cfg.mu_kt)
    return m_cap


def balanced_multiplicity(cfg: SystemConfig) -> float:
    """Real multiplicity at which fronthaul and edge delivery times coincide."""
    if cfg.r == 0:
        raise ValueError("balanced multiplicity is undefined at r = 0")
    a = float(cfg.mu_kt)
    return a / 2 + math.sqrt((a * cfg.n_t) ** 2 + 4 * cfg.n_t * cfg.k_t * float(cfg.r)) / (2 * cfg.n_t)


def _balanced_multiplicity_floor(cfg: SystemConfig) -> int:
    """Exact floor of the balanced multiplicity (no float rounding at integers)."""
    a = cfg.mu_kt * cfg.n_t
    d = a * a + 4 * cfg.n_t * cfg.k_t * cfg.r
    two_nt = 2 * cfg.n_t

    def at_least(n: int) -> bool:
        rhs = Fraction(two_nt * n) - a
        return rhs <= 0 or d >= rhs * rhs

    n = max(int((float(a) + math.sqrt(float(d))) / two_nt), 0)
    while not at_least(n):
        n -= 1
    while at_least(n + 1):
        n += 1
    return n


def pipelined_cache_threshold(cfg: SystemConfig) -> Fraction:
    """Value of mu*k_t beyond which pipelining sustains the maximum multiplicity."""
    m = max_multiplicity(cfg)
    return m - Fraction(cfg.k_t) * cfg.r / (m * cfg.n_t)


def pipelined_multiplicity(cfg: SystemConfig) -> int:
    """Multiplicity adopted under pipelined fronthaul-edge delivery."""
    if cfg.r == 0:
        cfg.require_feasible()
        return cache_multiplicity(cfg)
    if cfg.mu_kt <= pipelined_cache_threshold(cfg):
        return max(_balanced_multiplicity_floor(cfg), 1)
    return max_multiplicity(cfg)


def serial_bound_multiplicity(cfg: SystemConfig) -> float:
    """Real multiplicity entering the serial lower bound."""
    if cfg.r >= fronthaul_rate_threshold(cfg):
        return float(max_multiplicity(cfg))
    return max(math.sqrt(cfg.k_t * float(cfg.r) / cfg.n_t), 1.0)


def pipelined_bound_multiplicity(cfg: SystemConfig) -> float:
    """Real multiplicity entering the pipelined lower bound."""
    if cfg.mu_kt <= pipelined_cache_threshold(cfg):
        if cfg.r == 0:
            return max(float(cfg.mu_kt), 1.0)
        return max(balanced_multiplicity(cfg), 1.0)
    return float(max_multiplicity(cfg))


def lcm(a: int, b: int) -> int:
    return math.lcm(a, b)


def integer_cache_grid(cfg: SystemConfig) -> Iterable[Fraction]:
    """Cache sizes mu whose aggregate capacity mu*k_t is an integer."""
    start = 0 if cfg.r > 0 else 1
    return [Fraction(i, cfg.k_t) for i in range(start, cfg.k_t + 1)]
