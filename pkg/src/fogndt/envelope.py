"""Exact lower convex hulls of rational point sets.

The achievable NDT curves are step functions of the cache size whose
time-sharing envelopes are piecewise linear with rational breakpoints, so
the hull is computed entirely in Fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction


def lower_convex_hull(
    points: list[tuple[Fraction, Fraction]],
) -> list[tuple[Fraction, Fraction]]:
    """Lower convex hull of points with strictly increasing x coordinates.

    Returns the hull vertices left to right; interior points lying on a hull
    edge are dropped, so consecutive edge slopes are strictly increasing.
    """
    if not points:
        raise ValueError("no points to hull")
    xs = [p[0] for p in points]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("x coordinates must be strictly increasing")
    hull: list[tuple[Fraction, Fraction]] = []
    for x2, y2 in points:
        while len(hull) >= 2:
            x0, y0 = hull[-2]
            x1, y1 = hull[-1]
            # pop the middle point unless the turn at it is strictly convex:
            # slope(p0, p1) < slope(p1, p2)
            if (y1 - y0) * (x2 - x1) >= (y2 - y1) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append((x2, y2))
    return hull
