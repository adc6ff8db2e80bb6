"""Verification suites producing ResidualReport records."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .. import field
from .fit import (
    PowerFit,
    fit_power,
    predicted_blowup_exponent,
    predicted_h1_exponent,
    weighted_h_exponent,
)
from .norms import NormSeries, lp_integral, norm_series

DEFAULT_WINDOW = (1e-6, 1e-2)
ENERGY_WINDOW = (1e-10, 1e-6)


@dataclass
class ResidualReport:
    suite: str
    params: dict
    thresholds: dict
    measurements: list
    verdict: bool
    max_residual: float = 0.0
    rms_residual: float = 0.0
    convergence_order: float | None = None
    empirical_constants: dict = dc_field(default_factory=dict)
    grid_spec: str = ""

    def to_dict(self):
        summary = {
            "max_residual": self.max_residual,
            "rms_residual": self.rms_residual,
            "empirical_constants": self.empirical_constants,
            "grid_spec": self.grid_spec,
        }
        if self.convergence_order is not None:
            summary["convergence_order"] = self.convergence_order
        return {
            "suite": self.suite,
            "params": self.params,
            "thresholds": self.thresholds,
            "measurements": self.measurements,
            "summary": summary,
            "verdict": "pass" if self.verdict else "fail",
        }


def _cfg_params(cfg):
    return {"T": cfg.T, "alpha": cfg.alpha, "k_order": cfg.k_order,
            "bump_kind": cfg.bump.kind, "amplitude": cfg.bump.amplitude,
            "beta": cfg.beta}


def _window_times(cfg, window, n):
    lo, hi = window
    tau = np.geomspace(hi, lo, n)
    return cfg.T - tau


def _fit_dict(fit: PowerFit):
    return {"exponent": fit.exponent, "intercept": fit.intercept,
            "r_squared": fit.r_squared, "window": list(fit.window),
            "log_like": fit.log_like}


# --------------------------------------------------------------------------
# PDE residual

def pde_residual(cfg, n_r, n_t, window, *, drop_first_order=False):
    """Central-difference residual of (d_rr + d_r/r - 1/r^2 - d_t) phi_tilde - h1.

    Nodes are uniform in log r and in s = -log(T - t); derivatives carry the
    exact metric factors, so the stencils stay second order.
    """
    (r_lo, r_hi), (t_lo, t_hi) = window
    sig = np.linspace(math.log(r_lo), math.log(r_hi), n_r + 1)
    s = np.linspace(-math.log(cfg.T - t_lo), -math.log(cfg.T - t_hi), n_t + 1)
    r = np.exp(sig)
    t = cfg.T - np.exp(-s)
    R, Tt = np.meshgrid(r, t, indexing="ij")
    u = np.asarray(field.phi_tilde(cfg, R, Tt))
    hs, ht = sig[1] - sig[0], s[1] - s[0]
    c = u[1:-1, 1:-1]
    Ri, Ti = R[1:-1, 1:-1], Tt[1:-1, 1:-1]
    u_sig = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * hs)
    u_sigsig = (u[2:, 1:-1] - 2 * c + u[:-2, 1:-1]) / hs**2
    u_rr = (u_sigsig - u_sig) / Ri**2
    u_r = u_sig / Ri
    u_t = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * ht) / (cfg.T - Ti)
    op = u_rr - c / Ri**2 - u_t
    if not drop_first_order:
        op = op + u_r / Ri
    return op - np.asarray(field.forcing_h1(cfg, Ri, Ti))


def verify_pde(cfg, grid=(128, 128), window=None, *, levels=4, tol=1e-12,
               order_band=(1.8, 2.2), drop_first_order=False):
    """Refinement study of the governing identity for (phi_tilde, h1)."""
    if levels < 3:
        raise ValueError("a convergence study needs at least 3 levels")
    if window is None:
        window = ((0.05, 0.95), (0.0, cfg.T - 1e-3))
    (r_lo, _), (_, t_hi) = window
    if r_lo <= 0 or t_hi >= cfg.T:
        raise ValueError("window must exclude r = 0 and t = T")
    n_r, n_t = grid
    rows, maxes = [], []
    for lev in range(levels):
        res = pde_residual(cfg, n_r * 2**lev, n_t * 2**lev, window,
                           drop_first_order=drop_first_order)
        mx = float(np.abs(res).max())
        rms = float(np.sqrt(np.mean(res**2)))
        maxes.append(mx)
        rows.append({"level": lev, "n_r": n_r * 2**lev, "n_t": n_t * 2**lev,
                     "max_residual": mx, "rms_residual": rms})
    orders = []
    for a, b in zip(maxes[:-1], maxes[1:]):
        orders.append(math.log2(a / b) if a > 0 and b > 0 else float("nan"))
    for row, o in zip(rows[1:], orders):
        row["observed_order"] = o
    if maxes[-1] <= tol:
        verdict = True
    else:
        verdict = all(order_band[0] <= o <= order_band[1] for o in orders)
    finite = [o for o in orders if math.isfinite(o)]
    params = _cfg_params(cfg) | {
        "grid": list(grid), "levels": levels,
        "window": [list(window[0]), list(window[1])],
        "drop_first_order": drop_first_order,
    }
    return ResidualReport(
        suite="verify_pde", params=params,
        thresholds={"order_band": list(order_band), "zero_tol": tol},
        measurements=rows, verdict=verdict,
        max_residual=rows[-1]["max_residual"], rms_residual=rows[-1]["rms_residual"],
        convergence_order=finite[-1] if finite else None,
        grid_spec=f"log-r x log(T-t) grids, base {n_r}x{n_t}, {levels} dyadic levels",
    )


# --------------------------------------------------------------------------
# Pointwise bounds

def _graded_r(cfg, t, n_uniform, n_scaled, xi_max=4.0):
    """Radii in (0, 1]: a uniform grid plus points clustered at r ~ sqrt(2(T-t))."""
    edge = 1.0 / float(field.scale(cfg, t))
    uni = np.linspace(0.0, 1.0, n_uniform + 1)[1:]
    scaled = edge * np.linspace(0.0, xi_max, n_scaled + 1)[1:]
    return np.unique(np.concatenate([uni, scaled[scaled <= 1.0]]))


def _bound_constants(cfg, n_r, n_t):
    tau = np.geomspace(cfg.T, 1e-8, n_t)
    c1 = c2 = 0.0
    for t in cfg.T - tau:
        r = _graded_r(cfg, t, n_r, n_r)
        w = r * r + (cfg.T - t)
        c1 = max(c1, float(np.max(np.abs(field.phi(cfg, r, t)) * w / r)))
        c2 = max(c2, float(np.max(np.abs(field.dphi_dr(cfg, r, t)) * w)))
    return c1, c2


def verify_bounds(cfg, grid=(256, 16), *, levels=3, drift=0.05):
    """Empirical constants of |phi| <= C1 r/(r^2+T-t), |d_r phi| <= C2/(r^2+T-t)."""
    n_r, n_t = grid
    rows = []
    for lev in range(levels):
        c1, c2 = _bound_constants(cfg, n_r * 2**lev, n_t * 2**lev)
        rows.append({"level": lev, "n_r": n_r * 2**lev, "n_t": n_t * 2**lev,
                     "C1": c1, "C2": c2})

    def rel(key):
        a, b = rows[-2][key], rows[-1][key]
        return 0.0 if a == b else abs(b - a) / max(abs(a), abs(b))

    d1, d2 = rel("C1"), rel("C2")
    finite = all(math.isfinite(row[k]) for row in rows for k in ("C1", "C2"))
    verdict = finite and d1 <= drift and d2 <= drift
    return ResidualReport(
        suite="verify_bounds", params=_cfg_params(cfg) | {"grid": list(grid), "levels": levels},
        thresholds={"max_relative_drift": drift}, measurements=rows, verdict=verdict,
        empirical_constants={"C1": rows[-1]["C1"], "C2": rows[-1]["C2"],
                             "C1_drift": d1, "C2_drift": d2},
        grid_spec="graded r grid, log-spaced T - t in [1e-8, T]",
    )


# --------------------------------------------------------------------------
# Norm scaling, compensated h1 bound, energy

def _series_rows(series, T):
    return [{"t": float(t), "T_minus_t": float(T - t), "value": float(v)}
            for t, v in zip(series.times, series.values)]


def _zero_series(series):
    return not np.any(series.values)


def scaling_report(cfg, p, window=DEFAULT_WINDOW, n_times=12, tol=1e-3):
    """Two-sided rate of ||r^alpha h||_{L^p}, exact by self-similarity."""
    series = norm_series(cfg, "weighted_h", _window_times(cfg, window, n_times), p)
    predicted = -weighted_h_exponent(p, cfg.alpha)
    log_case = math.isclose((3 - cfg.alpha) * p, 2.0)
    if _zero_series(series):
        fit, err, verdict = None, 0.0, True
    else:
        fit = fit_power(series, cfg.T)
        err = abs(fit.exponent - predicted)
        verdict = err <= tol
    meas = {"series": _series_rows(series, cfg.T), "predicted_slope": predicted,
            "logarithmic_case": log_case, "slope_error": err}
    if fit:
        meas["fit"] = _fit_dict(fit)
    return ResidualReport(
        suite="scaling", params=_cfg_params(cfg) | {"p": p, "window": list(window)},
        thresholds={"slope_abs_tol": tol}, measurements=[meas], verdict=verdict,
        max_residual=err, grid_spec=f"{n_times} log-spaced times",
    ), series


def lemma_report(cfg, p, window=DEFAULT_WINDOW, n_times=12, max_ratio=10.0):
    """Uniform boundedness of ||h1||_p^p (T-t)^((3p-2-p alpha)/2) (or / |ln(T-t)|)."""
    pred = predicted_h1_exponent(p, cfg.alpha)
    times = _window_times(cfg, window, n_times)
    tau = cfg.T - times
    series = norm_series(cfg, "h1", times, p, power=True)
    if pred.logarithmic:
        comp = series.values / np.abs(np.log(tau))
    else:
        comp = series.values * tau ** (pred.exponent * p)
    if not np.any(comp):
        ratio, verdict = 1.0, True
    else:
        ratio = float(comp.max() / comp.min()) if comp.min() > 0 else math.inf
        verdict = math.isfinite(ratio) and ratio <= max_ratio
    rows = [{"t": float(t), "T_minus_t": float(s), "norm_p_power": float(v),
             "compensated": float(c)} for t, s, v, c in zip(times, tau, series.values, comp)]
    return ResidualReport(
        suite="lemma_bound",
        params=_cfg_params(cfg) | {"p": p, "window": list(window),
                                   "logarithmic": pred.logarithmic,
                                   "predicted_exponent": pred.exponent},
        thresholds={"max_over_min": max_ratio}, measurements=rows, verdict=verdict,
        empirical_constants={"max_over_min": ratio, "C": float(comp.max())},
        grid_spec=f"{n_times} log-spaced times",
    ), series


def energy_report(cfg, t_grid=None, *, window=ENERGY_WINDOW, n_times=12,
                  rel_tol=0.05, flat_tol=0.01):
    """L^2 norm of phi_tilde and squared L^2 norm of its radial derivative.

    The gradient energy must decay at rate -(1 - alpha) for alpha < 1 and
    stay bounded for alpha >= 1; the L^2 norm must not grow.
    """
    times = _window_times(cfg, window, n_times) if t_grid is None else np.asarray(t_grid)
    l2 = norm_series(cfg, "phi_tilde", times, 2)
    grad = norm_series(cfg, "dphi_tilde", times, 2, power=True)
    a = cfg.alpha
    meas = {"phi_tilde_L2": _series_rows(l2, cfg.T),
            "grad_energy": _series_rows(grad, cfg.T)}
    if _zero_series(l2) and _zero_series(grad):
        verdict = True
    else:
        f1 = fit_power(l2, cfg.T)
        f2 = fit_power(grad, cfg.T)
        meas["phi_tilde_L2_fit"] = _fit_dict(f1)
        meas["grad_energy_fit"] = _fit_dict(f2)
        l2_ok = f1.exponent >= -flat_tol
        if a < 1:
            target = -(1 - a)
            grad_ok = abs(f2.exponent - target) <= rel_tol * abs(target)
            meas["grad_case"] = "power"
        elif a == 1:
            grad_ok = f2.exponent >= -flat_tol or f2.log_like
            meas["grad_case"] = "log"
        else:
            grad_ok = f2.exponent >= -flat_tol
            meas["grad_case"] = "bounded"
        meas["phi_tilde_L2_bounded"] = l2_ok
        meas["grad_energy_ok"] = grad_ok
        verdict = l2_ok and grad_ok
    return ResidualReport(
        suite="energy", params=_cfg_params(cfg) | {"window": list(window)},
        thresholds={"grad_rel_tol": rel_tol, "flat_slope_min": -flat_tol},
        measurements=[meas], verdict=verdict,
        grid_spec=f"{len(times)} times",
    )


# --------------------------------------------------------------------------
# Blow-up of the (k-1)-th radial derivative

def sup_derivative(cfg, t, order, n=4000):
    """sup over r in (0, 1] of |d_r^order phi_tilde(r, t)| on a graded grid."""
    r = _graded_r(cfg, t, 512, n)
    return float(np.max(np.abs(field.radial_derivative(cfg, r, t, order))))


def blowup_report(cfg, t_window=DEFAULT_WINDOW, n_times=16, *, rel_tol=0.02, flat_tol=0.01):
    k = cfg.k_order
    times = _window_times(cfg, t_window, n_times)
    top = np.array([sup_derivative(cfg, t, k - 1) for t in times])
    predicted = predicted_blowup_exponent(k, cfg.alpha)
    meas = {"sup_series": [{"t": float(t), "T_minus_t": float(cfg.T - t), "value": float(v)}
                           for t, v in zip(times, top)],
            "predicted_rate": predicted, "derivative_order": k - 1}
    verdict = True
    if np.any(top):
        fit = fit_power(NormSeries(times, top, math.inf, f"d{k-1}"), cfg.T)
        rate = -fit.exponent
        meas["fit"] = _fit_dict(fit)
        meas["measured_rate"] = rate
        meas["rate_rel_error"] = abs(rate - predicted) / predicted
        verdict = meas["rate_rel_error"] <= rel_tol
    else:
        meas["measured_rate"] = 0.0
    if k >= 2:
        low = np.array([sup_derivative(cfg, t, k - 2) for t in times])
        meas["lower_sup_series"] = [float(v) for v in low]
        if np.any(low):
            lfit = fit_power(NormSeries(times, low, math.inf, f"d{k-2}"), cfg.T)
            meas["lower_fit"] = _fit_dict(lfit)
            bounded = lfit.exponent >= -flat_tol
        else:
            bounded = True
        meas["lower_bounded"] = bounded
        verdict = verdict and bounded
    return ResidualReport(
        suite="blowup", params=_cfg_params(cfg) | {"window": list(t_window)},
        thresholds={"rate_rel_tol": rel_tol, "flat_slope_min": -flat_tol},
        measurements=[meas], verdict=verdict,
        max_residual=meas.get("rate_rel_error", 0.0),
        grid_spec=f"{n_times} log-spaced times, graded r grid",
    )


# --------------------------------------------------------------------------
# Convection and boundary

def stokes_check(cfg, grid3d=16, times=None, tol=1e-12):
    """Finite-difference convection on a Cartesian grid inside D.

    The verdict uses the convection operator (v_r d_r + v_3 d_3) applied to
    each cylindrical component.  The full Cartesian (v.grad)v is reported as
    a diagnostic: it equals the centripetal gradient -(v_theta^2/r) e_r,
    which the pressure balances.
    """
    if times is None:
        times = (0.0, 0.5 * cfg.T, cfg.T - 1e-3)
    n = grid3d
    xs = np.linspace(-0.7, 0.7, n)
    zs = np.linspace(0.0, 1.0, n)
    X, Y, Z = np.meshgrid(xs, xs, zs, indexing="ij")
    pts = np.stack([X, Y, Z], axis=-1)
    R = np.hypot(X, Y)
    safe = np.where(R > 0, R, 1.0)
    er = (np.where(R > 0, X / safe, 0.0), np.where(R > 0, Y / safe, 0.0))
    h = (xs[1] - xs[0], xs[1] - xs[0], zs[1] - zs[0])
    rows = []
    worst = 0.0
    for t in times:
        v = field.velocity(cfg, pts, t)
        v_r = v[..., 0] * er[0] + v[..., 1] * er[1]
        v_th = -v[..., 0] * er[1] + v[..., 1] * er[0]
        v_3 = v[..., 2]
        conv = []
        for comp in (v_r, v_th, v_3):
            gx, gy, gz = np.gradient(comp, *h)
            d_r = gx * er[0] + gy * er[1]
            conv.append(v_r * d_r + v_3 * gz)
        reduced = float(max(np.abs(c).max() for c in conv))
        cart = np.zeros_like(v)
        for i in range(3):
            gx, gy, gz = np.gradient(v[..., i], *h)
            cart[..., i] = v[..., 0] * gx + v[..., 1] * gy + v[..., 2] * gz
        vt = np.asarray(field.v_theta(cfg, R, t))
        cent = np.where(R > 0, vt * vt / safe, 0.0)
        mismatch = np.stack([cart[..., 0] + cent * er[0], cart[..., 1] + cent * er[1],
                             cart[..., 2]], axis=-1)
        rows.append({
            "t": float(t),
            "reduced_convection_max": reduced,
            "max_abs_v_r": float(np.abs(v_r).max()),
            "max_abs_v_3": float(np.abs(v_3).max()),
            "cartesian_convection_max": float(np.linalg.norm(cart, axis=-1).max()),
            "centripetal_mismatch_max": float(np.linalg.norm(mismatch, axis=-1).max()),
        })
        worst = max(worst, reduced)
    vmax = max(float(np.abs(field.v_theta(cfg, np.linspace(0, 1, 257), t)).max())
               for t in times)
    azimuthal = all(row["max_abs_v_3"] == 0.0 and row["max_abs_v_r"] <= 4e-16 * max(vmax, 1e-300)
                    for row in rows)
    return ResidualReport(
        suite="stokes", params=_cfg_params(cfg) | {"grid3d": n, "times": list(times)},
        thresholds={"convection_max": tol}, measurements=rows,
        verdict=worst <= tol and azimuthal, max_residual=worst,
        grid_spec=f"{n}^3 Cartesian grid on [-0.7,0.7]^2 x [0,1]",
    )


def boundary_check(cfg, n_times=32, tol=1e-8):
    """|v_theta(1, t)| over log-spaced T - t in [1e-8, T]."""
    tau = np.geomspace(cfg.T, 1e-8, n_times)
    times = cfg.T - tau
    vals = np.abs(np.asarray(field.v_theta(cfg, np.ones_like(times), times)))
    rows = [{"t": float(t), "T_minus_t": float(s), "abs_v_theta": float(v)}
            for t, s, v in zip(times, tau, vals)]
    worst = float(vals.max())
    return ResidualReport(
        suite="boundary", params=_cfg_params(cfg) | {"n_times": n_times},
        thresholds={"abs_tol": tol}, measurements=rows, verdict=worst <= tol,
        max_residual=worst, rms_residual=float(np.sqrt(np.mean(vals**2))),
        grid_spec=f"r = 1, {n_times} log-spaced times",
    )
