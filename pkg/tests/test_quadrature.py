import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from frax.errors import AccuracyError, DomainError
from frax.quadrature import (
    QuadSpec,
    boundary_sum_1d,
    gauss_jacobi,
    gauss_legendre,
    integrate,
    integrate_pv,
    tanh_sinh_rule,
)

SEMI = QuadSpec(kind="semi_infinite")
SMOOTH = QuadSpec(kind="smooth")


def test_constant_integrand():
    assert integrate(lambda x: np.ones_like(x), -1.0, 1.0)[0] == pytest.approx(2.0, abs=1e-14)


def test_inverse_sqrt_endpoint_weight():
    # u = sqrt(t) turns the integrand into 2 / sqrt(1 + u^2), integrated by Gauss-Legendre
    val, err = integrate(lambda t: t ** -0.5 * (1 + t) ** -0.5, 0.0, 1.0)
    ref = integrate(lambda u: 2.0 / np.sqrt(1 + u * u), 0.0, 1.0, SMOOTH)[0]
    assert val == pytest.approx(ref, rel=1e-13)
    assert val == pytest.approx(2 * math.asinh(1.0), rel=1e-13)
    assert err <= 1e-11


def test_half_line_beta_value():
    s = 0.25
    val = integrate(lambda t: t ** (s - 1) * (1 + t) ** -0.5, 0.0, math.inf, SEMI)[0]
    assert val == pytest.approx(special.gamma(0.25) ** 2 / special.gamma(0.5), rel=1e-11)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_endpoint_power(alpha):
    assert integrate(lambda t: t ** (alpha - 1), 0.0, 1.0)[0] == pytest.approx(1 / alpha, rel=1e-10)


@pytest.mark.parametrize("kind", ["smooth", "endpoint_power"])
@pytest.mark.parametrize("deg", range(7))
def test_polynomials_exact(kind, deg):
    a, b = -0.3, 1.7
    val = integrate(lambda x: x ** deg, a, b, QuadSpec(kind=kind))[0]
    assert val == pytest.approx((b ** (deg + 1) - a ** (deg + 1)) / (deg + 1), abs=1e-12)


def test_pv_odd_examples():
    assert integrate_pv(lambda x: 1 / x, -1.0, 1.0, 0.0, 1.0) == pytest.approx(0.0, abs=1e-13)
    assert integrate_pv(lambda x: 1 / x + x, -1.0, 1.0, 0.0, 1.0) == pytest.approx(0.0, abs=1e-13)


def test_pv_asymmetric_interval():
    assert integrate_pv(lambda x: 1 / x, -1.0, 2.0, 0.0, 1.0) == pytest.approx(math.log(2.0), rel=1e-12)


def test_pv_rejects_strong_singularity():
    with pytest.raises(DomainError):
        integrate_pv(lambda x: x ** -2, -1.0, 1.0, 0.0, 2.0)
    with pytest.raises(DomainError):
        integrate_pv(lambda x: 1 / x, 0.0, 1.0, 0.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_pv_linearity(c, a1, a2):
    def f(x):
        return 1 / (x - c)

    def g(x):
        return np.cos(x) / (x - c)

    lhs = integrate_pv(lambda x: a1 * f(x) + a2 * g(x), -1.0, 1.0, c, 1.0)
    rhs = a1 * integrate_pv(f, -1.0, 1.0, c, 1.0) + a2 * integrate_pv(g, -1.0, 1.0, c, 1.0)
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.1, 0.9))
def test_additivity_across_split(alpha, m):
    def f(t):
        return t ** (alpha - 1) * np.exp(-t)

    whole = integrate(f, 0.0, 1.0)[0]
    parts = integrate(f, 0.0, m)[0] + integrate(f, m, 1.0)[0]
    assert whole == pytest.approx(parts, rel=1e-11)


def test_non_convergence_carries_estimate():
    with pytest.raises(AccuracyError) as info:
        integrate(lambda x: np.sin(200 * x) ** 2, 0.0, 1.0, QuadSpec(1e-15, 1e-15, 2))
    assert math.isfinite(info.value.value)


def test_quadspec_validation_and_bounds():
    with pytest.raises(DomainError):
        QuadSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadSpec(max_refinements=0)
    with pytest.raises(DomainError):
        QuadSpec(kind="adaptive")
    with pytest.raises(DomainError):
        integrate(lambda x: x, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate(lambda x: x, 0.0, 1.0, QuadSpec(kind="principal_value"))


def test_boundary_sum_examples():
    assert boundary_sum_1d(lambda sig: 3.0) == 0.0
    assert boundary_sum_1d(lambda sig: 3.0, with_normal=False) == 6.0
    assert boundary_sum_1d(lambda sig: sig) == 2.0
    assert boundary_sum_1d(lambda sig: sig, half_width=2.5) == 5.0


@pytest.mark.parametrize("a,b", [(0.0, 0.0), (-0.5, 0.3), (0.7, -0.2)])
def test_gauss_jacobi_weight_moments(a, b):
    x, w = gauss_jacobi(12, a, b)
    ref = 2 ** (a + b + 1) * special.beta(a + 1, b + 1)
    assert w.sum() == pytest.approx(ref, rel=1e-13)
    assert not x.flags.writeable


def test_rules_sum_to_measure():
    x, w = gauss_legendre(10)
    assert w.sum() == pytest.approx(2.0, rel=1e-15)
    nodes, comps, weights = tanh_sinh_rule(4)
    assert weights.sum() == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(nodes + comps, 1.0, atol=1e-15)
