"""Power-law fits in (T - t) and the predicted exponents they are checked against."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np


class InsufficientWindow(ValueError):
    """Too few samples or too narrow a (T - t) range for a power-law fit."""


class PowerFit(NamedTuple):
    exponent: float
    intercept: float
    r_squared: float
    window: tuple
    log_like: bool = False


class Prediction(NamedTuple):
    """Growth exponent e of a norm ~ (T - t)**(-e); ``logarithmic`` marks |ln(T - t)|."""

    exponent: float
    logarithmic: bool = False


def _r_squared(y, yhat):
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    return max(0.0, 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot)


def fit_power(series, T, *, min_samples=8, min_decades=3.0):
    """Least-squares slope s of log(value) against log(T - t).

    ``log_like`` is set when value is better explained as affine in
    ln(T - t) than as a power law, the signature of a logarithmic rate.
    """
    tau = T - np.asarray(series.times, dtype=float)
    vals = np.asarray(series.values, dtype=float)
    if tau.size < min_samples:
        raise InsufficientWindow(f"need at least {min_samples} samples, got {tau.size}")
    if np.any(tau <= 0):
        raise InsufficientWindow("all sample times must precede T")
    decades = math.log10(tau.max() / tau.min())
    if decades < min_decades - 1e-9:
        raise InsufficientWindow(f"T - t spans {decades:.2f} decades, need {min_decades}")
    if np.any(vals <= 0):
        raise ValueError("power-law fit needs positive values")
    x = np.log(tau)
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    r2 = _r_squared(y, slope * x + intercept)
    b, a = np.polyfit(x, vals, 1)
    r2_log = _r_squared(vals, b * x + a)
    log_like = bool(abs(slope) < 0.25 and r2_log > r2 and np.ptp(y) > 1e-6)
    return PowerFit(float(slope), float(intercept), r2, (float(tau.min()), float(tau.max())),
                    log_like)


def predicted_h1_exponent(p, alpha):
    """Norm-level growth of ||h1||_{L^p}: (3p - 2 - p alpha) / (2p), or log."""
    if not 1 + p * alpha - p > -1:
        raise ValueError("requires 1 + p*alpha - p > -1")
    if math.isclose((3 * p - p * alpha) / 2, 1.0, rel_tol=0, abs_tol=1e-12):
        return Prediction(0.0, True)
    return Prediction((3 * p - 2 - p * alpha) / (2 * p))


def predicted_vtilde_exponent(p, alpha):
    """Norm-level growth of ||phi_tilde||_{L^p}: (p - 2 - p alpha) / (2p), or log."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if math.isclose((p - p * alpha) / 2, 1.0, rel_tol=0, abs_tol=1e-12):
        return Prediction(0.0, True)
    return Prediction((p - 2 - p * alpha) / (2 * p))


def predicted_blowup_exponent(k_order, alpha):
    """Growth (k - alpha)/2 of sup_r |d_r^(k-1) phi_tilde|."""
    if not k_order - 1 <= alpha < k_order:
        raise ValueError("need k - 1 <= alpha < k")
    return (k_order - alpha) / 2.0


def weighted_h_exponent(p, alpha):
    """Exact growth of ||r^alpha h||_{L^p}: ((3 - alpha) p - 2) / (2p)."""
    return ((3 - alpha) * p - 2) / (2 * p)
