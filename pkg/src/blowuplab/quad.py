"""Adaptive one-dimensional quadrature.

Panels are refined by bisection until the Simpson/half-Simpson difference
meets an absolute tolerance that is split in half on each bisection.  All
active panels of a refinement sweep are evaluated in one vectorised call,
so integrands must accept and return numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_PANELS = 2**20
_INITIAL_PANELS = 16


class QuadratureError(RuntimeError):
    """Adaptive refinement hit the panel cap before meeting the tolerance."""

    def __init__(self, message, estimate, error_estimate):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int


def _evaluate(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    if np.isnan(y).any():
        raise ValueError("integrand returned NaN")
    return y


def _adapt(f, a, b, tol, max_panels=MAX_PANELS):
    """Integrate f over each panel [a[i], b[i]] to absolute tolerance tol[i].

    Returns (values, errors, evaluations) per input panel.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    tol = np.asarray(tol, dtype=float)
    n = a.size
    values = np.zeros(n)
    errors = np.zeros(n)
    owner = np.arange(n)
    fa = _evaluate(f, a)
    fb = _evaluate(f, b)
    fm = _evaluate(f, 0.5 * (a + b))
    evaluations = 3 * n
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    panels = n
    while a.size:
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = _evaluate(f, lm)
        frm = _evaluate(f, rm)
        evaluations += 2 * a.size
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        halves = left + right
        diff = (halves - whole) / 15.0
        done = np.abs(diff) <= tol
        # a panel narrower than a few ulps cannot be refined further
        done |= (m <= a) | (m >= b)
        if done.any():
            np.add.at(values, owner[done], halves[done] + diff[done])
            np.add.at(errors, owner[done], np.abs(diff[done]))
        keep = ~done
        if not keep.any():
            break
        panels += int(keep.sum())
        if panels > max_panels:
            np.add.at(values, owner[keep], halves[keep] + diff[keep])
            np.add.at(errors, owner[keep], np.abs(diff[keep]))
            raise QuadratureError(
                f"no convergence within {max_panels} panels",
                values, errors,
            )
        a, m, b = a[keep], m[keep], b[keep]
        fa, flm, fm, frm, fb = fa[keep], flm[keep], fm[keep], frm[keep], fb[keep]
        left, right = left[keep], right[keep]
        half_tol = 0.5 * tol[keep]
        owner = np.repeat(owner[keep], 2)
        # interleave children: [a, m] then [m, b]
        a = np.column_stack([a, m]).ravel()
        b = np.column_stack([m, b]).ravel()
        fa, fm, fb = (np.column_stack([fa, fm]).ravel(),
                      np.column_stack([flm, frm]).ravel(),
                      np.column_stack([fm, fb]).ravel())
        whole = np.column_stack([left, right]).ravel()
        tol = np.repeat(half_tol, 2)
    return values, errors, evaluations


def integrate(f, a, b, tol=1e-10, *, breakpoints=(), max_panels=MAX_PANELS):
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    ``breakpoints`` are extra panel edges inside (a, b); use them where the
    integrand changes scale.  Raises QuadratureError (carrying the best
    estimate) when the panel cap is exceeded and ValueError on NaN.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if b < a:
        raise ValueError("require a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    inner = sorted(x for x in breakpoints if a < x < b)
    coarse = np.unique(np.concatenate([[a], inner, [b]]))
    edges = np.concatenate([
        np.linspace(lo, hi, _INITIAL_PANELS + 1)[:-1]
        for lo, hi in zip(coarse[:-1], coarse[1:])
    ] + [[b]])
    lo, hi = edges[:-1], edges[1:]
    share = np.full(lo.size, tol / lo.size)
    try:
        values, errors, evals = _adapt(f, lo, hi, share, max_panels)
    except QuadratureError as exc:
        raise QuadratureError(
            str(exc), float(exc.estimate.sum()), float(exc.error_estimate.sum())
        ) from None
    return QuadResult(float(values.sum()), float(errors.sum()), evals)


def cumulative(f, grid, tol=1e-10, max_panels=MAX_PANELS):
    """Prefix integrals of ``f`` from ``grid[0]`` to each grid point.

    Each grid interval is integrated to ``tol``, so entry i is accurate to
    ``i * tol``.  Entry 0 is exactly zero.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    if not tol > 0:
        raise ValueError("tol must be positive")
    out = np.zeros(grid.size)
    if grid.size == 1:
        return out
    values, _, _ = _adapt(f, grid[:-1], grid[1:], np.full(grid.size - 1, tol),
                          max_panels)
    out[1:] = np.cumsum(values)
    return out


def composite_simpson(f, a, b, n):
    """Fixed composite Simpson rule with ``n`` (even) subintervals."""
    if n % 2:
        raise ValueError("n must be even")
    x = np.linspace(a, b, n + 1)
    y = _evaluate(f, x)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


_GL_CACHE = {}


def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]
