import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frax.constants import FracParams, constants_for
from frax.errors import UnsupportedOrderError
from frax.green1d import IntervalDomain
from frax.hadamard import hadamard_green
from frax.rkhs import (
    check_gram_psd,
    check_reproducing,
    check_s_harmonic,
    classical_lions_kernel,
    classical_trend,
    gram,
    harmonic_profile,
    kernel,
)

non_half = st.floats(0.05, 0.95).filter(lambda s: abs(s - 0.5) > 0.01)


def test_kernel_symmetric():
    p = FracParams(0.3)
    assert kernel(p, 0.2, -0.7).K == kernel(p, -0.7, 0.2).K


def test_kernel_is_scaled_hadamard_integrand():
    s = 0.3
    p = FracParams(s)
    for x, y in ((0.2, -0.7), (0.5, 0.55)):
        assert kernel(p, x, y).K == pytest.approx(math.gamma(s) ** 2 * hadamard_green(p, x, y).rhs, rel=1e-13)


def test_kernel_at_centre():
    s = 0.25
    c = constants_for(FracParams(s))
    ref = 2 * c.lions_prefactor * (2**s / s * c.kappa_s) ** 2
    assert kernel(FracParams(s), 0.0, 0.0).K == pytest.approx(ref, rel=1e-14)


def test_kernel_excludes_half_order():
    with pytest.raises(UnsupportedOrderError):
        kernel(FracParams(0.5), 0.1, 0.2)


@settings(max_examples=40, deadline=None)
@given(non_half, st.floats(-0.95, 0.95))
def test_kernel_diagonal_positive(s, x):
    assert kernel(FracParams(s), x, x).K > 0


@settings(max_examples=40, deadline=None)
@given(non_half, st.lists(st.floats(-0.95, 0.95), min_size=1, max_size=8))
def test_gram_positive_semidefinite(s, xs):
    g = gram(FracParams(s), xs)
    np.testing.assert_array_equal(g, g.T)
    assert np.linalg.eigvalsh(g).min() >= -1e-10 * max(1.0, np.abs(g).max())


def test_gram_check_report():
    r = check_gram_psd(FracParams(0.4), np.linspace(-0.9, 0.9, 8))
    assert r.passed and r.lhs >= -1e-10


def test_reproducing_examples():
    r = check_reproducing(FracParams(0.25), 0.5)
    assert r.lhs == pytest.approx(0.75 ** (0.25 - 1), rel=1e-15)
    assert r.abs_err <= 1e-12
    z = check_reproducing(FracParams(0.6), 0.0)
    assert z.lhs == 1.0 and z.rhs == pytest.approx(1.0, rel=1e-14)
    assert check_reproducing(FracParams(0.75), -0.3).abs_err <= 1e-10


@settings(max_examples=40, deadline=None)
@given(non_half, st.floats(-0.95, 0.95), st.floats(-5.0, 5.0).filter(lambda a: abs(a) > 1e-3))
def test_reproducing_linear_in_amplitude(s, x, a):
    r = check_reproducing(FracParams(s), x, amplitude=a)
    assert r.passed


def test_reproducing_negative_amplitude_and_scaled_interval():
    assert check_reproducing(FracParams(0.35), 0.1, amplitude=-2.5).passed
    assert check_reproducing(FracParams(0.35), 1.0, IntervalDomain(2.0)).passed


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_profile_is_s_harmonic(s):
    for z in np.linspace(-0.9, 0.9, 10):
        r = check_s_harmonic(FracParams(s), z)
        assert abs(r.lhs) <= 5e-3 and r.passed


def test_harmonic_profile_vanishes_outside():
    u = harmonic_profile(FracParams(0.3))
    np.testing.assert_array_equal(u(np.array([-1.5, 1.0, 2.0])), 0.0)
    assert float(u(0.0)) == 1.0


def test_classical_kernel_formula():
    # endpoint normal derivatives of G(x,y) = (min+1)(1-max)/2 are (1+x)/2 and (1-x)/2
    for x, y in ((0.3, -0.2), (0.0, 0.0), (0.9, 0.8)):
        ref = (1 + x) * (1 + y) / 4 + (1 - x) * (1 - y) / 4
        assert float(classical_lions_kernel(x, y)) == pytest.approx(ref, rel=1e-15)


def test_classical_limit_trend():
    g = np.linspace(-0.8, 0.8, 5)
    near = max(classical_trend(FracParams(0.95), x, y) for x in g for y in g)
    nearer = max(classical_trend(FracParams(0.99), x, y) for x in g for y in g)
    assert near <= 0.2
    assert nearer < near
