"""Deterministic optimization helpers shared by the bound evaluators.

Simplex grids, golden-section refinement and coordinate descent.  All
routines are pure and deterministic given their configuration, so grid work
can be partitioned across workers and merged with max + lexicographic
tie-break without changing results.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, sqrt
from typing import Callable, Iterator

import numpy as np

GOLDEN = (sqrt(5.0) - 1.0) / 2.0
# Refinement accepts only improvements beyond this to avoid cycling on
# piecewise-smooth objectives.
IMPROVE_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    simplex_resolution: int = 12
    golden_tol: float = 1e-9
    golden_max_iter: int = 200
    descent_max_rounds: int = 60
    max_grid_points: int = 2_000_000

    def __post_init__(self):
        if self.simplex_resolution < 1 or self.golden_tol <= 0:
            raise ValueError("resolutions and tolerances must be positive")
        if self.golden_max_iter < 1 or self.descent_max_rounds < 1:
            raise ValueError("iteration caps must be positive")


def simplex_point_count(k: int, m: int) -> int:
    return comb(m + k - 1, k - 1)


def enumerate_simplex(k: int, m: int, max_points: int | None = None) -> Iterator[np.ndarray]:
    """Lexicographic stream of all pmfs on k symbols with coordinates j/m."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    total = simplex_point_count(k, m)
    if max_points is not None and total > max_points:
        raise ValueError(f"simplex grid has {total} points, exceeding cap {max_points}")

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            yield prefix + [remaining]
            return
        for j in range(remaining + 1):
            yield from rec(prefix + [j], remaining - j, slots - 1)

    for counts in rec([], m, k):
        yield np.asarray(counts, dtype=float) / m


def simplex_grid_array(k: int, m: int, max_points: int | None = None) -> np.ndarray:
    """All grid pmfs stacked into one (count, k) array, lexicographic order."""
    return np.stack(list(enumerate_simplex(k, m, max_points)))


def golden_refine(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> tuple[float, float, bool]:
    """Golden-section maximization on [lo, hi].

    Returns (x, f(x), converged); `converged` is False when the iteration cap
    was hit before the bracket shrank below tol.
    """
    if not lo < hi:
        raise ValueError("invalid bracket")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    converged = True
    it = 0
    while b - a > tol:
        if it >= max_iter:
            converged = False
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        it += 1
    # Include the endpoints so monotone objectives return a bracket edge.
    cands = [(a, f(a)), (x1, f1), (x2, f2), (b, f(b))]
    best = max(cands, key=lambda t: t[1])
    return best[0], best[1], converged


def coordinate_descent_triangle(
    f: Callable[[float, float], float],
    start: tuple[float, float],
    steps: tuple[float, ...] = (0.02, 0.005, 0.001),
    max_rounds: int = 60,
) -> tuple[tuple[float, float], float]:
    """Coordinate ascent of f(alpha, beta) on {a, b >= 0, a + b <= 1}.

    Feasibility is preserved at every iterate and the value never decreases.
    """
    a, b = start
    if a < 0 or b < 0 or a + b > 1 + 1e-12:
        raise ValueError("infeasible start")
    best = f(a, b)
    for step in steps:
        for _ in range(max_rounds):
            improved = False
            for da, db in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
                na, nb = a + da, b + db
                if na < -1e-15 or nb < -1e-15 or na + nb > 1 + 1e-12:
                    continue
                na, nb = max(na, 0.0), max(nb, 0.0)
                val = f(na, nb)
                if val > best + IMPROVE_TOL:
                    a, b, best = na, nb, val
                    improved = True
            if not improved:
                break
    return (a, b), best
