"""Admissible exponent region of the construction.

A force lies in L^q_t L^p_x when [(3 - alpha) p - 2] q < 2; the velocity lies
in L^q~_t L^p~_x when [(1 - alpha) p~ - 2] q~ < 2.  ``q = math.inf`` is the
limit case, where the bracket itself must be negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INF = math.inf
GOLDEN = (1 + math.sqrt(5)) / 2
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class Bound:
    """A supremum or infimum together with whether it is attained."""

    value: float
    open: bool


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool
    hi_open: bool

    def __contains__(self, x):
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below


def _strict(bracket, q):
    if math.isinf(q):
        return bracket < 0
    return bracket * q < 2


def admissible_force(q, p, alpha):
    """[(3 - alpha) p - 2] q < 2 (strict)."""
    if q < 1 or p < 1:
        raise ValueError("need q >= 1 and p >= 1")
    return _strict((3 - alpha) * p - 2, q)


def admissible_velocity(q, p, alpha):
    """[(1 - alpha) p - 2] q < 2 (strict); always true for alpha >= 1."""
    if q < 1 or p < 1:
        raise ValueError("need q >= 1 and p >= 1")
    return _strict((1 - alpha) * p - 2, q)


def axis_integrable(p, alpha):
    """1 + p alpha - p > -1, the integrability condition implied by admissibility."""
    return 1 + p * alpha - p > -1


def blowup_order(alpha):
    """The integer k with k - 1 <= alpha < k, clamped to 1..3."""
    return min(3, max(1, math.floor(alpha) + 1))


def criticality(q, p):
    """2/q + 3/p; q = inf contributes nothing."""
    return (0.0 if math.isinf(q) else 2.0 / q) + 3.0 / p


def _time_budget(q):
    return 2.0 + (0.0 if math.isinf(q) else 2.0 / q)


def sup_p(q, k_order=1):
    """Open supremum of force-admissible p over alpha in [k-1, k).

    The constraint reads p < (2/q + 2)/(3 - alpha); it is largest as alpha
    tends to k and is never attained.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if k_order not in (1, 2, 3):
        raise ValueError("k_order must be 1, 2 or 3")
    if k_order == 3:
        return Bound(INF, True)
    return Bound(_time_budget(q) / (3 - k_order), True)


def _bisect(f, lo, hi, xtol=1e-15, maxiter=200):
    flo = f(lo)
    if flo == 0:
        return lo
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < xtol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sup_diagonal(k_order=1):
    """Open supremum of p = q with p < sup_p(p): the fixed point of p = sup_p(p)."""
    if k_order == 3:
        return Bound(INF, True)
    f = lambda p: p - sup_p(p, k_order).value
    hi = 2.0
    while f(hi) < 0:
        hi *= 2
    return Bound(_bisect(f, 1.0, hi), True)


def alpha_window(q, p, k_order):
    """{alpha in [k-1, k) : [(3 - alpha) p - 2] q < 2}, or None when empty."""
    if k_order not in (1, 2, 3):
        raise ValueError("k_order must be 1, 2 or 3")
    threshold = 3.0 - _time_budget(q) / p
    lo, hi = float(k_order - 1), float(k_order)
    if threshold >= hi:
        return None
    if threshold >= lo:
        return Interval(threshold, hi, True, True)
    return Interval(lo, hi, False, True)


def golden_section(f, a, b, tol=1e-12, maxiter=500):
    """Minimise a unimodal f on [a, b]; returns (x, f(x))."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= tol * (1 + abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _frontier_criticality(q, k_order):
    return criticality(q, sup_p(q, k_order).value)


def _stationary_bracket(k_order, q_max=1e6):
    """Bracket the sign change of d/dq of the frontier criticality."""
    g = lambda q: _frontier_criticality(q, k_order)
    qs = np.geomspace(1.0, q_max, 400)
    vals = np.array([g(q) for q in qs])
    i = int(np.argmin(vals))
    return qs[max(i - 1, 0)], qs[min(i + 1, qs.size - 1)]


def grid_oracle_infimum(k_order=1, q_max=40.0, n_q=40001, n_alpha=201):
    """Dense (q, alpha) search of 2/q + 3/p with p at its admissible closure."""
    q = np.linspace(1.0, q_max, n_q)[:, None]
    a = np.linspace(k_order - 1, k_order, n_alpha)[None, :]
    p = (2.0 + 2.0 / q) / (3.0 - a)
    crit = 2.0 / q + 3.0 / p
    i, j = np.unravel_index(np.argmin(crit), crit.shape)
    return float(crit[i, j]), float(q[i, 0]), float(p[i, j])


@dataclass(frozen=True)
class Infimum:
    value: float
    minimizer: tuple
    method: str
    oracle_value: float
    oracle_agreement: float

    def to_dict(self):
        return {"value": self.value, "minimizer": list(self.minimizer),
                "method": self.method, "oracle_value": self.oracle_value,
                "oracle_agreement": self.oracle_agreement}


def criticality_infimum(k_order=1, tol=1e-4):
    """Infimum of 2/q + 3/p over the closure of the admissible region.

    Criticality decreases in p, so the infimum sits on the frontier
    p = sup_p(q); that one-dimensional problem is solved by golden-section
    search and certified against a dense grid search.
    """
    if k_order not in (1, 2):
        raise ValueError("the region is unbounded in p for k_order = 3")
    lo, hi = _stationary_bracket(k_order)
    q_star, value = golden_section(lambda q: _frontier_criticality(q, k_order), lo, hi)
    oracle, _, _ = grid_oracle_infimum(k_order)
    agreement = abs(value - oracle)
    if agreement > tol:
        raise ArithmeticError(f"frontier minimum {value} disagrees with grid oracle {oracle}")
    return Infimum(float(value), (float(q_star), float(sup_p(q_star, k_order).value)),
                   "golden_section_frontier", oracle, float(agreement))


@dataclass(frozen=True)
class Sweep:
    q_values: np.ndarray
    p_values: np.ndarray
    admissible: np.ndarray  # shape (len(p_values), len(q_values)), row-major in p
    frontier: list

    def rows(self):
        for i, p in enumerate(self.p_values):
            for j, q in enumerate(self.q_values):
                yield q, p, bool(self.admissible[i, j])


def sweep(q_bounds, p_bounds, resolution, alpha=None, k_order=None):
    """Rasterise the force constraint over a (q, p) rectangle.

    With ``k_order`` instead of ``alpha`` a point counts as admissible when
    some alpha in [k-1, k) works, and the frontier is the alpha -> k limit.
    """
    if (alpha is None) == (k_order is None):
        raise ValueError("give exactly one of alpha or k_order")
    (q0, q1), (p0, p1) = q_bounds, p_bounds
    if resolution <= 0 or q1 < q0 or p1 < p0:
        return Sweep(np.empty(0), np.empty(0), np.empty((0, 0), dtype=bool), [])
    qs = np.linspace(q0, q1, resolution)
    ps = np.linspace(p0, p1, resolution)
    if alpha is not None:
        grid = np.array([[admissible_force(q, p, alpha) for q in qs] for p in ps], dtype=bool)
        a_front = alpha
    else:
        grid = np.array([[alpha_window(q, p, k_order) is not None for q in qs] for p in ps],
                        dtype=bool)
        a_front = float(k_order)
    frontier = []
    if a_front < 3:
        for q in qs:
            pf = _time_budget(q) / (3 - a_front)
            if p0 <= pf <= p1:
                frontier.append((float(q), float(pf)))
    return Sweep(qs, ps, grid, frontier)
