"""Spatial L^p norms over the cylinder and mixed L^q_t L^p_x norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import field, quad

SELECTORS = ("v_theta", "h1", "phi_tilde", "dphi_tilde", "h", "weighted_h")


class NonIntegrableError(ValueError):
    """|field|^p r is not integrable at the axis for this exponent."""


@dataclass(frozen=True)
class NormSeries:
    times: np.ndarray
    values: np.ndarray
    p: float
    label: str

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly ascending")
        if not np.all(np.isfinite(values)):
            raise ValueError("norm values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def _evaluator(cfg, selector):
    if selector == "v_theta":
        return lambda r, t: field.v_theta(cfg, r, t)
    if selector == "h1":
        return lambda r, t: field.forcing_h1(cfg, r, t)
    if selector == "phi_tilde":
        return lambda r, t: field.phi_tilde(cfg, r, t)
    if selector == "dphi_tilde":
        def dphi(r, t):
            r = np.asarray(r, dtype=float)
            pos = r > 0
            val = field.radial_derivative(cfg, np.where(pos, r, 1.0), t, 1)
            axis = field.dphi_dr(cfg, 0.0, t) if cfg.alpha == 0 else 0.0
            return np.where(pos, val, axis)
        return dphi
    if selector == "h":
        return lambda r, t: field.forcing_h(cfg, r, t)
    if selector == "weighted_h":
        return lambda r, t: np.power(np.asarray(r, dtype=float), cfg.alpha) * field.forcing_h(cfg, r, t)
    if selector == "one":
        return lambda r, t: np.ones_like(np.asarray(r, dtype=float))
    raise ValueError(f"unknown selector {selector!r}")


def axis_exponent(cfg, selector, p):
    """Power of r in |field|^p r near the axis (only h1 can be singular)."""
    a = cfg.alpha
    if selector == "h1" and 0 < a < 1:
        return 1 + p * a - p
    return 1.0


def lp_integral(cfg, selector, t, p, tol=None, rtol=1e-10):
    """2 pi int_0^1 |field(r, t)|^p r dr.

    ``tol`` is absolute; when omitted it is ``rtol`` times a coarse estimate.
    Panels are split geometrically around the self-similar scale
    sqrt(2 (T - t)) and the axis piece is integrated after r = r1 u^m,
    which removes integrable power singularities.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    gamma = axis_exponent(cfg, selector, p)
    if gamma <= -1:
        raise NonIntegrableError(
            f"|{selector}|^p r ~ r^{gamma:g} is not integrable at r = 0"
            f" (need 1 + p*alpha - p > -1)")
    f = _evaluator(cfg, selector)
    edge = 1.0 / float(field.scale(cfg, t))

    def integrand(r):
        with np.errstate(invalid="ignore", over="ignore"):
            v = np.abs(np.asarray(f(r, t), dtype=float)) ** p * r
        return np.where(r > 0, v, 0.0)

    r1 = min(edge / 64.0, 0.5)
    m = max(2, math.ceil(3.0 / (gamma + 1.0)))

    def axis_piece(u):
        return integrand(r1 * u**m) * m * r1 * u ** (m - 1)

    breaks = sorted({min(edge * 2.0**j, 1.0) for j in range(-6, 60)
                     if r1 < edge * 2.0**j < 1.0})
    if tol is None:
        nodes = np.concatenate([[r1], breaks, [1.0]])
        coarse = sum(quad.composite_simpson(integrand, lo, hi, 16)
                     for lo, hi in zip(nodes[:-1], nodes[1:]))
        coarse += quad.composite_simpson(axis_piece, 0.0, 1.0, 16)
        tol = rtol * abs(coarse) + 1e-300
    inner = quad.integrate(axis_piece, 0.0, 1.0, 0.5 * tol).value
    outer = quad.integrate(integrand, r1, 1.0, 0.5 * tol, breakpoints=breaks).value
    return 2.0 * math.pi * (inner + outer)


def lp_norm_x(cfg, selector, t, p, tol=None):
    """(2 pi int_0^1 |field|^p r dr)^(1/p) on D = unit disc x [0, 1]."""
    return lp_integral(cfg, selector, t, p, tol) ** (1.0 / p)


def norm_series(cfg, selector, times, p, *, power=False):
    """Spatial norm (or its p-th power) at each time."""
    times = np.asarray(times, dtype=float)
    vals = [lp_integral(cfg, selector, t, p) for t in times]
    vals = np.array(vals) if power else np.array(vals) ** (1.0 / p)
    label = f"{selector}^p" if power else selector
    return NormSeries(times=times, values=vals, p=p, label=label)


def lq_norm_t(series, q):
    """Trapezoid-rule L^q norm in time of a norm series (q = inf gives the max)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    v = np.abs(series.values)
    if math.isinf(q):
        return float(v.max()) if v.size else 0.0
    return float(np.trapezoid(v**q, series.times)) ** (1.0 / q)
