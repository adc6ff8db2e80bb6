"""Time-dependent fields of the blow-up construction.

phi(r, t) = lam * phi0(r * lam) with lam = (2 (T - t))**-1/2 is the
self-similar swirl, ``phi_tilde = r**alpha * phi`` the modified solution and
``h1`` the force under which it solves

    (d_rr + d_r / r - 1 / r**2 - d_t) phi_tilde = h1.

The velocity adds the rigid rotation ``beta * r`` so that it vanishes on the
lateral wall r = 1 whenever T <= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quad
from .profile import BumpSpec, Profile, build_profile, bump


@dataclass(frozen=True, eq=False)
class BlowupConfig:
    T: float
    alpha: float
    bump: BumpSpec
    profile: Profile

    def __post_init__(self):
        if not 0 < self.T <= 0.5:
            raise ValueError("T must lie in (0, 1/2]")
        if not 0 <= self.alpha < 3:
            raise ValueError("alpha must lie in [0, 3)")

    @property
    def k_order(self):
        return int(math.floor(self.alpha)) + 1

    @property
    def beta(self):
        return self.profile.beta


def make_config(T=0.5, alpha=0.5, bump=None, *, tol=1e-10, allow_degenerate=False,
                r_max=3.0, n_points=1024):
    bump = bump or BumpSpec()
    prof = build_profile(bump, r_max=r_max, n_points=n_points, tol=tol,
                         allow_degenerate=allow_degenerate)
    return BlowupConfig(T=T, alpha=alpha, bump=bump, profile=prof)


def scale(cfg, t):
    """lam(t) = 1/sqrt(2 (T - t)); rejects t >= T."""
    t = np.asarray(t, dtype=float)
    if np.any(t >= cfg.T):
        raise ValueError("t must be strictly less than T")
    return 1.0 / np.sqrt(2.0 * (cfg.T - t))


def _out(x):
    return x if np.ndim(x) else float(x)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    return r


def phi(cfg, r, t):
    r = _check_r(r)
    lam = scale(cfg, t)
    return _out(lam * cfg.profile.evaluate(r * lam, 0))


def dphi_dr(cfg, r, t):
    r = _check_r(r)
    lam = scale(cfg, t)
    return _out(lam**2 * cfg.profile.evaluate(r * lam, 1))


def d2phi_dr2(cfg, r, t):
    r = _check_r(r)
    lam = scale(cfg, t)
    return _out(lam**3 * cfg.profile.evaluate(r * lam, 2))


def dphi_dt(cfg, r, t):
    r = _check_r(r)
    lam = scale(cfg, t)
    xi = r * lam
    p = cfg.profile
    return _out(lam**3 * (p.evaluate(xi, 0) + xi * p.evaluate(xi, 1)))


def forcing_h(cfg, r, t):
    r = _check_r(r)
    lam = scale(cfg, t)
    return _out(lam**3 * bump(cfg.bump, r * lam))


def _rpow(r, a):
    # r**a with 0**0 = 1 and 0**a = 0 for a > 0
    with np.errstate(divide="ignore"):
        return np.power(r, a)


def phi_tilde(cfg, r, t):
    r = _check_r(r)
    return _out(_rpow(r, cfg.alpha) * np.asarray(phi(cfg, r, t)))


def v_theta(cfg, r, t):
    r = _check_r(r)
    return _out(np.asarray(phi_tilde(cfg, r, t)) + cfg.beta * r)


def forcing_h1(cfg, r, t):
    """h1 = r^a h + a^2 r^(a-2) phi + 2 a r^(a-1) d_r phi.

    On the axis the value is the r -> 0 limit: 0 for a = 0 and a > 1,
    3 d_r phi(0, t) for a = 1, and a signed infinity for 0 < a < 1.
    """
    r, t = np.broadcast_arrays(_check_r(r), np.asarray(t, dtype=float))
    a = cfg.alpha
    p = np.asarray(phi(cfg, r, t))
    dp = np.asarray(dphi_dr(cfg, r, t))
    h = np.asarray(forcing_h(cfg, r, t))
    pos = r > 0
    rs = np.where(pos, r, 1.0)
    out = rs**a * h
    if a != 0:
        out = out + a * a * rs ** (a - 2) * p + 2 * a * rs ** (a - 1) * dp
    if not pos.all():
        d0 = np.asarray(dphi_dr(cfg, np.zeros_like(r), t))
        if a == 0 or a > 1:
            axis = np.zeros_like(r)
        elif a == 1:
            axis = 3.0 * d0
        else:
            axis = np.where(d0 == 0, 0.0, np.copysign(np.inf, d0))
        out = np.where(pos, out, axis)
    return _out(out)


def radial_derivative(cfg, r, t, order):
    """d_r^order phi_tilde for order 0..2 by the Leibniz rule (r > 0)."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    r = _check_r(r)
    if np.any(r <= 0):
        raise ValueError("radial_derivative needs r > 0")
    a = cfg.alpha
    derivs = [np.asarray(phi(cfg, r, t))]
    if order >= 1:
        derivs.append(np.asarray(dphi_dr(cfg, r, t)))
    if order == 2:
        derivs.append(np.asarray(d2phi_dr2(cfg, r, t)))
    total = 0.0
    for i in range(order + 1):
        falling = math.prod(a - j for j in range(i))
        total = total + math.comb(order, i) * falling * r ** (a - i) * derivs[order - i]
    return _out(total)


def dphi_tilde_dt(cfg, r, t):
    r = _check_r(r)
    return _out(_rpow(r, cfg.alpha) * np.asarray(dphi_dt(cfg, r, t)))


def velocity(cfg, x, t):
    """Cartesian velocity (v1, v2, v3) at points x of shape (..., 3) in D."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise ValueError("x must have trailing dimension 3")
    r = np.hypot(x[..., 0], x[..., 1])
    if np.any(r > 1 + 1e-12) or np.any(x[..., 2] < 0) or np.any(x[..., 2] > 1):
        raise ValueError("point outside the cylinder D")
    vt = np.asarray(v_theta(cfg, np.minimum(r, 1.0), t))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(r > 0, vt / np.where(r > 0, r, 1.0), 0.0)
    return np.stack([-x[..., 1] * ratio, x[..., 0] * ratio, np.zeros_like(r)], axis=-1)


def pressure(cfg, r, t, tol=1e-12):
    """P(r, t) = int_0^r v_theta(l, t)^2 / l dl."""
    if r < 0 or r > 1:
        raise ValueError("r must lie in [0, 1]")
    lam = float(scale(cfg, t))
    if r == 0:
        return 0.0

    def integrand(l):
        vt = np.asarray(v_theta(cfg, l, t))
        return np.where(l > 0, vt * vt / np.where(l > 0, l, 1.0), 0.0)

    edge = 1.0 / lam
    breaks = [edge * f for f in (0.25, 0.5, 1.0)]
    return quad.integrate(integrand, 0.0, r, tol, breakpoints=breaks).value


def pressure_profile(cfg, r_grid, t, tol=1e-12):
    """P at every point of an ascending radial grid starting at 0."""
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid[0] != 0 or r_grid[-1] > 1:
        raise ValueError("grid must start at 0 and stay within [0, 1]")

    def integrand(l):
        vt = np.asarray(v_theta(cfg, l, t))
        return np.where(l > 0, vt * vt / np.where(l > 0, l, 1.0), 0.0)

    return quad.cumulative(integrand, r_grid, tol)
