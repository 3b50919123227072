import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from microyoung.catalog import parse_kernel
from microyoung.errors import BoundaryWarning, MultiplePoints, NoExtension, NotAdmissible
from microyoung.extension import (extend, extension_degree, multiply_and_extend,
                                  punctured_product, scaling_degree)
from microyoung.kernels import PowerLaw, cusp, pair
from microyoung.testfn import TestFunction, make_bump


def _psi(R, c):
    return TestFunction(make_bump(1.0).profile, radius=R, center=c)


@pytest.mark.parametrize("kid,expect", [("delta@0", 1.0), ("delta'@0", 2.0),
                                         ("powerlaw@0:-0.5", 0.5), ("powerlaw@0:-1.5", 1.5),
                                         ("constant-1", 0.0)])
def test_scaling_degrees(kid, expect):
    assert scaling_degree(parse_kernel(kid), 0.0).value == pytest.approx(expect, abs=0.05)


def test_scaling_degree_away_from_support():
    assert scaling_degree(parse_kernel("delta@0"), 0.5).value == -math.inf


def test_extension_degree_and_boundary_warning():
    assert extension_degree(0.5, 1) == (-0.5, -1)
    assert extension_degree(2.5, 1) == (1.5, 1)
    with pytest.warns(BoundaryWarning):
        rho, deg = extension_degree(1.95, 1)
    assert deg == 1 and rho < 1


def test_jet_functions_have_exact_jets():
    fam = extend(PowerLaw.make(0.0, -2.5))
    assert fam.degree == 1 and len(fam.indices) == 2
    x0 = np.array([0.0])
    for a in fam.indices:
        psi = fam.jet_function(a)
        for b in fam.indices:
            val = float(np.asarray(psi.deriv(b, x0)).ravel()[0])
            assert val == (1.0 if tuple(a) == tuple(b) else 0.0)


def test_subtraction_kills_the_jet():
    fam = extend(PowerLaw.make(0.0, -2.5))
    phi = _psi(0.5, 0.2)
    for b in fam.indices:
        assert fam.jet_of_subtracted(phi, b) == 0.0
    # the jet functions themselves pair to the counterterm only
    assert fam.base_pairing(fam.jet_function((0,))) == pytest.approx(0.0, abs=1e-12)


def test_base_pairing_with_first_order_subtraction():
    fam = extend(PowerLaw.make(0.0, -2.5))
    phi = _psi(0.5, 0.2)
    chi = fam.jet_function((0,))
    p0 = float(phi(np.array([0.0]))[0])
    p1 = float(phi.deriv((1,), np.array([0.0]))[0])

    def g(y):
        a = np.array([y])
        w = float(phi(a)[0]) - (p0 + p1 * y) * float(chi(a)[0])
        return w * abs(y) ** -2.5
    # the subtracted numerator cancels to roundoff next to 0; QUADPACK notices and says so
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        ref = sum(integrate.quad(g, a, b, limit=400, epsabs=1e-11)[0]
                  for a, b in ((-1.0, 0.0), (0.0, 1.0)))
    assert fam.base_pairing(phi) == pytest.approx(ref, rel=1e-7, abs=1e-9)


@given(a0=st.floats(-10, 10), a1=st.floats(-10, 10), c=st.floats(-0.3, 0.3))
def test_family_members_differ_by_point_counterterms(a0, a1, c):
    fam = extend(PowerLaw.make(0.0, -2.5))
    phi = _psi(0.5, c)
    x0 = np.array([0.0])
    diff = fam.pair(phi, {(0,): a0, (1,): a1}) - fam.pair(phi)
    expect = a0 * float(phi(x0)[0]) - a1 * float(phi.deriv((1,), x0)[0])
    assert diff == pytest.approx(expect, rel=1e-9, abs=1e-9)


def test_unique_extension_agrees_with_integrable_pairing():
    fam = extend(PowerLaw.make(0.0, -0.5))
    assert fam.unique
    phi = _psi(0.5, 0.1)
    assert fam.pair(phi) == pytest.approx(pair(PowerLaw.make(0.0, -0.5), phi), rel=1e-8)


def test_member_is_a_distribution():
    fam = extend(PowerLaw.make(0.0, -1.0), coefficients={"0": 2.0})
    m = fam.member()
    phi = _psi(0.5, 0.1)
    assert pair(m, phi) == pytest.approx(fam.pair(phi))
    d = fam.to_dict()
    assert d["coefficients"] == {"0": 2.0}


def test_extend_needs_pointwise_form():
    with pytest.raises(NoExtension):
        extend(parse_kernel("delta@0"))


def test_punctured_product_of_power_laws():
    p = punctured_product(PowerLaw.make(0.0, -0.2), PowerLaw.make(0.0, -0.3))
    assert isinstance(p, PowerLaw) and p.exponent == pytest.approx(-0.5)


def test_admissible_products_need_no_extension():
    ext = multiply_and_extend(cusp(0.0, 1.0), parse_kernel("delta@0"))
    assert ext.case == "no-extension-needed" and ext.unique


def test_multiple_common_points_rejected():
    f = PowerLaw.make(0.0, -0.5) + PowerLaw.make(0.5, -0.5)
    with pytest.raises(MultiplePoints):
        multiply_and_extend(f, f)


def test_noise_rejected():
    n = parse_kernel("noise:0")
    with pytest.raises(NotAdmissible):
        multiply_and_extend(n, n)


def test_smooth_times_singular_case():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryWarning)
        ext = multiply_and_extend(PowerLaw.make(0.0, -0.6), PowerLaw.make(0.0, -0.6))
    assert ext.case == "both-negative"
    assert ext.family.degree == 0 and not ext.unique
