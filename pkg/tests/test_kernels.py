import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from microyoung.errors import DomainMismatch, InsufficientDerivatives, NonIntegrableSingularity
from microyoung.kernels import (DiracDelta, LogDerivative, PowerLaw, Region, Sum, constant, cusp,
                                function_from_sympy, multiply_by_smooth, pair, pair_scaled,
                                polynomial, smooth_bump_function, white_noise)
from microyoung.testfn import TestFunction, make_bump, scale_translate

# frozen high-precision values (mpmath, 30 digits) for the unit-radius bump
BUMP_AMPLITUDE = 0.12903785681365212
INT_POWERLAW_HALF = 0.144920335470990301473196154251  # int |x|^-1/2 phi
INT_CUSP_06 = 0.0278893486461599492420223138048  # int |x|^0.6 phi


@pytest.fixture(scope="module")
def phi():
    return make_bump(1.0)


def test_bump_amplitude_golden(phi):
    assert phi.amplitude == pytest.approx(BUMP_AMPLITUDE, rel=1e-10)
    assert float(phi(np.array([0.0]))[0]) == pytest.approx(BUMP_AMPLITUDE / math.e, rel=1e-10)


def test_powerlaw_pairing_golden(phi):
    assert pair(PowerLaw.make(0.0, -0.5), phi) == pytest.approx(INT_POWERLAW_HALF, rel=1e-10)


def test_cusp_pairing_golden(phi):
    assert pair(cusp(0.0, 0.6), phi) == pytest.approx(INT_CUSP_06, rel=1e-10)


def test_log_derivative_of_even_bump_vanishes(phi):
    assert abs(pair(LogDerivative.make(0.0), phi)) < 1e-10


def test_log_derivative_matches_principal_value():
    psi = TestFunction(make_bump(1.0).profile, radius=0.5, center=0.2)
    from scipy import integrate
    # PV int psi(x)/x = int_0^R (psi(x) - psi(-x))/x
    g = lambda x: (float(psi(np.array([x]))[0]) - float(psi(np.array([-x]))[0])) / x
    ref = integrate.quad(g, 0.0, 0.7, limit=200)[0]
    assert pair(LogDerivative.make(0.0), psi) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_delta_derivative_pairing(k):
    psi = TestFunction(make_bump(1.0).profile, radius=0.6, center=0.15)
    d = DiracDelta.make(0.0, (k,) if k else ())
    expect = (-1) ** k * float(psi.deriv((k,), np.array([0.0]))[0])
    assert pair(d, psi) == pytest.approx(expect, rel=1e-12)


def test_delta_in_two_dimensions():
    phi = make_bump(1.0, dim=2)
    assert pair(DiracDelta.make((0.0, 0.0), dim=2), phi) == pytest.approx(
        float(phi(np.array([[0.0, 0.0]]))[0]))


def test_nonintegrable_power_needs_vanishing_test(phi):
    with pytest.raises(NonIntegrableSingularity):
        pair(PowerLaw.make(0.0, -1.0), phi)
    away = TestFunction(make_bump(1.0).profile, radius=0.2, center=0.5)
    assert pair(PowerLaw.make(0.0, -1.0), away) > 0


def test_sympy_function_pairs_like_quadrature():
    x = sp.Symbol("y0")
    f = function_from_sympy(sp.cos(x), 1)
    psi = TestFunction(make_bump(1.0).profile, radius=0.5, center=0.1)
    from scipy import integrate
    ref = integrate.quad(lambda y: math.cos(y) * float(psi(np.array([y]))[0]), -0.4, 0.6)[0]
    assert pair(f, psi) == pytest.approx(ref, rel=1e-8)
    assert f.deriv((2,), np.array([0.0]))[0] == pytest.approx(-1.0)


def test_sympy_function_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        function_from_sympy(sp.Symbol("t") ** 2, 1)


def test_cusp_derivative_limit():
    f = cusp(0.0, 1.5)
    assert np.isfinite(f.piecewise_deriv((1,), np.array([0.3]))).all()


def test_insufficient_derivatives_for_delta_prime():
    f = cusp(0.0, 1.0)
    if f.max_derivative is None:
        pytest.skip("cusp has unbounded derivatives here")
    with pytest.raises(InsufficientDerivatives):
        multiply_by_smooth(DiracDelta.make(0.0, (f.max_derivative + 1,)), f)


@given(lam=st.floats(0.01, 1.0), a=st.floats(-0.9, -0.1))
def test_powerlaw_homogeneity(lam, a):
    u = PowerLaw.make(0.0, a)
    phi = make_bump(1.0)
    assert pair_scaled(u, phi, 0.0, lam) == pytest.approx(lam ** a * pair(u, phi), rel=1e-8)


@given(lam=st.floats(0.01, 1.0), x=st.floats(-0.3, 0.3), k=st.integers(0, 2))
def test_delta_scaled_pairing_matches_rescaled_test(lam, x, k):
    lam = min(lam, 1.0 - abs(x))
    u = DiracDelta.make(0.0, (k,) if k else ())
    phi = make_bump(1.0)
    direct = pair(u, scale_translate(phi, lam, x)) if abs(x) < lam else 0.0
    assert pair_scaled(u, phi, x, lam) == pytest.approx(direct, rel=1e-8, abs=1e-10)


@given(w1=st.floats(-3, 3), w2=st.floats(-3, 3), c=st.floats(-0.4, 0.4))
def test_sum_is_linear(w1, w2, c):
    psi = TestFunction(make_bump(1.0).profile, radius=0.5, center=c)
    a, b = DiracDelta.make(0.0), cusp(0.0, 0.6)
    s = Sum(dim=1, terms=((w1, a), (w2, b)))
    assert pair(s, psi) == pytest.approx(w1 * pair(a, psi) + w2 * pair(b, psi),
                                         rel=1e-9, abs=1e-12)


def test_constant_and_polynomial():
    psi = make_bump(0.5)
    mass = pair(constant(1.0), psi)
    assert pair(constant(3.0), psi) == pytest.approx(3 * mass)
    p = polynomial([1.0, 0.0, 2.0])
    assert np.allclose(p(np.array([0.0, 1.0, -1.0])), [1.0, 3.0, 3.0])


def test_bump_function_is_smooth_and_local():
    b = smooth_bump_function(0.0, 0.5)
    assert b(np.array([0.6]))[0] == 0.0
    assert b(np.array([0.0]))[0] > 0


def test_white_noise_is_everywhere_singular_and_seeded():
    a, b = white_noise(n=256, seed=3), white_noise(n=256, seed=3)
    assert a.singular_everywhere
    psi = make_bump(0.5)
    assert pair(a, psi) == pair(b, psi)


def test_region_contains_and_centered():
    K = Region.centered(np.array([0.0]), 0.5)
    assert K.dim == 1
