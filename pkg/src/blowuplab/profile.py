"""The self-similar profile generated by a compactly supported bump.

With ``g(s) = int_s^1 exp(-l^2/2) k(l) dl`` the profile is
``phi0(r) = -F(r)/r`` where ``F(r) = int_0^r s exp(s^2/2) g(s) ds``.
Exchanging the order of integration gives the single-integral form

    F(r) = A(r) + expm1(r^2/2) g(r),   A(r) = int_0^r k(l) (1 - exp(-l^2/2)) dl,

which is what gets tabulated; it avoids the 0/0 at the axis and the nested
quadrature.  Beyond r = 1 the profile is exactly ``-beta/r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quad
from .io import write_csv

STANDARD = "standard_mollifier"
POLYNOMIAL = "scaled_polynomial"

NEAR_AXIS = 1e-6
_SERIES_CUTOFF = 0.25
_KNOTS = 1024
_GL_NODES = 20


@dataclass(frozen=True)
class BumpSpec:
    """Generator k(r), supported in [0, 1].

    ``standard_mollifier``: amplitude * exp(-1/(r(1-r))).
    ``scaled_polynomial``: amplitude * (4 r (1-r))**exponent, C^(exponent-1) at the edges.
    An amplitude of zero gives the degenerate k = 0.
    """

    kind: str = STANDARD
    amplitude: float = 1.0
    exponent: int = 4

    def __post_init__(self):
        if self.kind not in (STANDARD, POLYNOMIAL):
            raise ValueError(f"unknown bump kind {self.kind!r}")
        if not (self.amplitude >= 0 and math.isfinite(self.amplitude)):
            raise ValueError("amplitude must be finite and nonnegative")
        if self.kind == POLYNOMIAL and self.exponent < 4:
            raise ValueError("polynomial bump needs exponent >= 4")

    @property
    def degenerate(self):
        return self.amplitude == 0

    def __call__(self, r):
        return bump(self, r)


def bump(spec, r):
    """Evaluate k(r); zero outside the open unit interval."""
    r = np.asarray(r, dtype=float)
    inside = (r > 0) & (r < 1)
    rr = np.where(inside, r, 0.5)
    if spec.kind == STANDARD:
        val = np.exp(-1.0 / (rr * (1.0 - rr)))
    else:
        val = (4.0 * rr * (1.0 - rr)) ** spec.exponent
    out = np.where(inside, spec.amplitude * val, 0.0)
    return out if out.ndim else float(out)


def _tail_integrand(spec):
    return lambda l: np.exp(-0.5 * l * l) * bump(spec, l)


def _core_integrand(spec):
    return lambda l: bump(spec, l) * -np.expm1(-0.5 * l * l)


def tail(spec, s, tol=1e-12):
    """g(s) = int_s^1 exp(-l^2/2) k(l) dl (zero for s >= 1)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s >= 1:
        return 0.0
    return quad.integrate(_tail_integrand(spec), s, 1.0, tol).value


def beta(spec, tol=1e-12):
    """Far-field amplitude beta = F(1), via the exchanged single integral."""
    return quad.integrate(_core_integrand(spec), 0.0, 1.0, tol).value


def _series_b2(r):
    # e^x/r - 2 expm1(x)/r^3 - r e^x with x = r^2/2, summed as a power series
    out = np.zeros_like(r)
    r2 = r * r
    term = r.copy()
    for m in range(1, 14):
        c = (1.0 / math.factorial(m) - 1.0 / math.factorial(m + 1)
             - 2.0 / math.factorial(m - 1)) / 2.0**m
        out += c * term
        term = term * r2
    return out


@dataclass(frozen=True, eq=False)
class Profile:
    """Tabulated profile plus an evaluator for arbitrary arguments.

    Tables live on ``r_grid``; ``evaluate`` reaches any r >= 0 through a fine
    knot table of g and A on [0, 1] corrected by a local Gauss-Legendre rule.
    """

    spec: BumpSpec
    r_grid: np.ndarray
    F: np.ndarray
    phi0: np.ndarray
    phi0_prime: np.ndarray
    phi0_second: np.ndarray
    beta: float
    tol: float
    g0: float
    _knots: np.ndarray = field(repr=False)
    _g_knots: np.ndarray = field(repr=False)
    _a_knots: np.ndarray = field(repr=False)

    @property
    def r_max(self):
        return float(self.r_grid[-1])

    def _local(self, fn, lo, hi):
        x, w = quad.gauss_legendre(_GL_NODES)
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        return half * (fn(nodes) @ w)

    def g_and_a(self, r):
        """Return (g(r), A(r)) for an array r >= 0."""
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        g = np.zeros_like(flat)
        a = np.full_like(flat, self._a_knots[-1])
        inside = flat < 1.0
        x = flat[inside]
        if x.size:
            n = self._knots.size - 1
            j = np.clip(np.floor(x * n).astype(int), 0, n - 1)
            left = self._knots[j]
            g[inside] = self._g_knots[j] - self._local(_tail_integrand(self.spec), left, x)
            a[inside] = self._a_knots[j] + self._local(_core_integrand(self.spec), left, x)
        return g.reshape(r.shape), a.reshape(r.shape)

    def evaluate(self, r, order=0):
        """phi0 or its first/second derivative at r >= 0 (array-valued)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("profile argument must be nonnegative")
        g, a = self.g_and_a(r)
        b = self.beta
        axis = r < NEAR_AXIS
        far = r >= 1.0
        rs = np.where(axis, 1.0, r)
        x = 0.5 * rs * rs
        with np.errstate(over="ignore", invalid="ignore"):
            if order == 0:
                out = -(a + np.expm1(x) * g) / rs
                near = -0.5 * self.g0 * r
                farv = -b / rs
            elif order == 1:
                out = -g * (np.exp(x) - np.expm1(x) / (rs * rs)) + a / (rs * rs)
                near = np.full_like(r, -0.5 * self.g0)
                farv = b / (rs * rs)
            elif order == 2:
                direct = np.exp(x) / rs - 2.0 * np.expm1(x) / rs**3 - rs * np.exp(x)
                b2 = np.where(rs < _SERIES_CUTOFF, _series_b2(rs), direct)
                out = bump(self.spec, rs) + g * b2 - 2.0 * a / rs**3
                near = -0.75 * self.g0 * r
                farv = -2.0 * b / rs**3
            else:
                raise ValueError("order must be 0, 1 or 2")
        out = np.where(far, farv, np.where(axis, near, out)) + 0.0
        return out if out.ndim else float(out)

    def to_csv(self, path):
        rows = zip(self.r_grid, self.F, self.phi0, self.phi0_prime, self.phi0_second)
        write_csv(path, ["r", "F", "phi0", "phi0_prime", "phi0_second"], rows)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def build_profile(spec, r_max=3.0, n_points=1024, tol=1e-10, *,
                  allow_degenerate=False, refine=False):
    """Tabulate F, phi0 and its first two derivatives on [0, r_max].

    ``refine`` adds geometrically clustered points near r = 0 and r = 1.
    """
    if r_max < 2:
        raise ValueError("r_max must be at least 2")
    if n_points < 64:
        raise ValueError("n_points must be at least 64")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if spec.degenerate and not allow_degenerate:
        raise ValueError("k = 0 is degenerate (beta = 0); pass allow_degenerate=True")

    knots = np.linspace(0.0, 1.0, _KNOTS + 1)
    per_panel = tol / _KNOTS
    tail_cum = quad.cumulative(_tail_integrand(spec), knots, per_panel)
    g_knots = tail_cum[-1] - tail_cum
    a_knots = quad.cumulative(_core_integrand(spec), knots, per_panel)
    beta_value = float(a_knots[-1])

    grid = np.linspace(0.0, r_max, n_points)
    if refine:
        extra = np.concatenate([np.geomspace(1e-6, 1e-1, 32),
                                1.0 - np.geomspace(1e-4, 1e-1, 16),
                                1.0 + np.geomspace(1e-4, 1e-1, 16)])
        grid = np.unique(np.concatenate([grid, extra[extra < r_max]]))

    prof = Profile(
        spec=spec, r_grid=_frozen(grid), F=_frozen(np.zeros(1)),
        phi0=_frozen(np.zeros(1)), phi0_prime=_frozen(np.zeros(1)),
        phi0_second=_frozen(np.zeros(1)), beta=beta_value, tol=tol,
        g0=float(g_knots[0]), _knots=_frozen(knots), _g_knots=_frozen(g_knots),
        _a_knots=_frozen(a_knots),
    )
    g, a = prof.g_and_a(grid)
    F = np.where(grid >= 1.0, beta_value, a + np.expm1(0.5 * grid * grid) * g)
    object.__setattr__(prof, "F", _frozen(F))
    object.__setattr__(prof, "phi0", _frozen(prof.evaluate(grid, 0)))
    object.__setattr__(prof, "phi0_prime", _frozen(prof.evaluate(grid, 1)))
    object.__setattr__(prof, "phi0_second", _frozen(prof.evaluate(grid, 2)))
    return prof


def ode_residual(profile, r):
    """phi0'' + phi0'/r - phi0/r^2 - phi0 - r phi0' - k(r) from the closed forms."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > profile.r_max):
        raise ValueError(f"r must lie in (0, {profile.r_max}]")
    p0 = profile.evaluate(r, 0)
    p1 = profile.evaluate(r, 1)
    p2 = profile.evaluate(r, 2)
    out = p2 + p1 / r - p0 / r**2 - p0 - r * p1 - bump(profile.spec, r)
    return out if np.ndim(out) else float(out)
