import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blowuplab import quad

GAUSS_01 = math.sqrt(math.pi / 2) * math.erf(1 / math.sqrt(2))


def richardson_simpson(f, a, b, n):
    coarse = quad.composite_simpson(f, a, b, n)
    fine = quad.composite_simpson(f, a, b, 2 * n)
    return fine + (fine - coarse) / 15.0


def test_constant():
    res = quad.integrate(lambda x: np.ones_like(x), 0.0, 1.0, 1e-12)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert 0 <= res.error_estimate <= 1e-12


def test_gaussian_against_richardson_oracle():
    f = lambda x: np.exp(-0.5 * x * x)
    oracle = richardson_simpson(f, 0.0, 1.0, 512)
    assert oracle == pytest.approx(GAUSS_01, abs=1e-14)
    assert oracle == pytest.approx(0.8556243918921488, abs=1e-13)
    res = quad.integrate(f, 0.0, 1.0, 1e-10)
    assert abs(res.value - oracle) <= 1e-10


def test_empty_interval():
    res = quad.integrate(lambda x: np.exp(x), 0.3, 0.3, 1e-8)
    assert res.value == 0.0 and res.evaluations == 0


def test_bad_inputs():
    with pytest.raises(ValueError):
        quad.integrate(np.sin, 1.0, 0.0, 1e-8)
    with pytest.raises(ValueError):
        quad.integrate(np.sin, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError, match="NaN"):
        quad.integrate(lambda x: np.where(x > 0.5, np.nan, x), 0.0, 1.0, 1e-8)


def test_nonconvergence_carries_estimate():
    f = lambda x: np.sign(x - 1 / 3) * np.abs(x - 1 / 3) ** -0.5
    with pytest.raises(quad.QuadratureError) as info:
        quad.integrate(f, 0.0, 1.0, 1e-14, max_panels=200)
    assert math.isfinite(info.value.estimate)
    assert info.value.error_estimate > 0


def test_deterministic():
    f = lambda x: np.cos(7 * x) * np.exp(-x)
    assert quad.integrate(f, 0, 3, 1e-11) == quad.integrate(f, 0, 3, 1e-11)


def test_breakpoints_resolve_narrow_spike():
    f = lambda x: np.exp(-(((x - 0.7331) / 1e-4) ** 2))
    exact = math.sqrt(math.pi) * 1e-4
    res = quad.integrate(f, 0.0, 1.0, 1e-14, breakpoints=[0.733, 0.7332])
    assert res.value == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("f, grid, expected", [
    (lambda s: 2.0 * np.ones_like(s), [0, 0.5, 1], [0, 1, 2]),
    (lambda s: np.zeros_like(s), [0, 0.3, 2.0], [0, 0, 0]),
    (lambda s: s, [0, 1, 2], [0, 0.5, 2.0]),
])
def test_cumulative_examples(f, grid, expected):
    np.testing.assert_allclose(quad.cumulative(f, grid, 1e-12), expected, atol=1e-12)


def test_cumulative_matches_prefix_integrals():
    grid = np.linspace(0.0, 2.0, 9)
    tol = 1e-11
    cum = quad.cumulative(np.cos, grid, tol)
    assert cum[0] == 0.0
    for i, x in enumerate(grid):
        assert abs(cum[i] - math.sin(x)) <= max(i, 1) * tol


def test_cumulative_rejects_unsorted():
    with pytest.raises(ValueError):
        quad.cumulative(np.sin, [0.0, 0.5, 0.5], 1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(0, 2), st.floats(0, 2))
def test_additivity(a, d1, d2):
    f = lambda x: np.exp(np.sin(3 * x))
    b, c = a + d1, a + d1 + d2
    tol = 1e-10
    lhs = quad.integrate(f, a, c, tol).value
    rhs = quad.integrate(f, a, b, tol).value + quad.integrate(f, b, c, tol).value
    assert abs(lhs - rhs) <= 2 * tol


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(alpha, beta):
    f = lambda x: np.exp(-x * x)
    g = lambda x: x**3 - x
    tol = 1e-10
    combo = quad.integrate(lambda x: alpha * f(x) + beta * g(x), 0, 2, tol).value
    parts = alpha * quad.integrate(f, 0, 2, tol).value + beta * quad.integrate(g, 0, 2, tol).value
    # each of the three integrals is within tol of its exact value
    assert abs(combo - parts) <= tol * (1 + abs(alpha) + abs(beta))


def test_composite_rule_order_at_least_four():
    f = lambda x: np.exp(-0.5 * x * x)
    errs = [abs(quad.composite_simpson(f, 0, 1, n) - GAUSS_01) for n in (4, 8, 16, 32)]
    orders = [math.log2(a / b) for a, b in zip(errs[:-1], errs[1:])]
    assert min(orders) >= 3.9
