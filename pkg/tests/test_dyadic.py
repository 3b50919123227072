import math

import numpy as np
import pytest

from microyoung.catalog import parse_kernel
from microyoung.dyadic import (FrequencyGrid, annulus, besov_norm, block_series, build_partition,
                               dyadic_critical_exponent, local_besov_norm, low_pass, lp_block,
                               testfn_critical_exponent)
from microyoung.errors import BandTooNarrow


@pytest.fixture(scope="module")
def P():
    return build_partition(dim=1)


def test_partition_of_unity(P):
    r = P.grid.norms()
    resolved = np.abs(r) <= P.resolved_band
    assert np.max(np.abs(P.total()[resolved] - 1.0)) <= 1e-10


def test_partition_of_unity_two_dimensions():
    P2 = build_partition(dim=2)
    r = P2.grid.norms()
    assert np.max(np.abs(P2.total()[r <= P2.resolved_band] - 1.0)) <= 1e-10


def test_multipliers_are_nonnegative_and_localized():
    r = np.linspace(0, 16, 2001)
    assert np.all(low_pass(r) >= 0) and np.all(annulus(r) >= 0)
    assert np.all(low_pass(r)[r > 4] == 0)


def test_too_many_blocks_rejected():
    with pytest.raises(BandTooNarrow):
        build_partition(FrequencyGrid(64, 1), j_max=12)


def test_blocks_sum_back_to_the_field(P):
    u = parse_kernel("bump@0:0.5")
    series = block_series(u, P)
    total = np.sum(series.blocks, axis=0)
    from microyoung import grids
    field = grids.render(u, P.grid.n)
    assert np.max(np.abs(total - field)) < 1e-8 * np.max(np.abs(field))


def test_block_index_checked(P):
    with pytest.raises(ValueError):
        lp_block(parse_kernel("delta@0"), P, P.j_max + 1)


@pytest.mark.parametrize("kid,expect", [("delta@0", -1.0), ("powerlaw@0:-0.5", -0.5),
                                         ("cusp@0:0.6", 0.6), ("logderiv@0", -1.0)])
def test_dyadic_exponent(P, kid, expect):
    assert dyadic_critical_exponent(parse_kernel(kid), math.inf, P).slope == pytest.approx(
        expect, abs=0.05)


def test_dyadic_exponent_two_norm(P):
    # delta blocks grow like 2^{j d/2} in L^2
    assert dyadic_critical_exponent(parse_kernel("delta@0"), 2.0, P).slope == pytest.approx(
        -0.5, abs=0.05)


def test_testfn_exponent_of_smooth_kernel_is_infinite():
    assert math.isinf(testfn_critical_exponent(parse_kernel("constant-1")).slope)


def test_besov_norm_finite_below_and_divergent_above(P):
    u = parse_kernel("cusp@0:0.6")
    below = besov_norm(u, 0.4, P=P)
    above = besov_norm(u, 0.8, P=P)
    assert below.tail_slope < 0 < above.tail_slope


def test_local_besov_norm_positive():
    est = local_besov_norm(parse_kernel("delta@0"), -1.5)
    assert est.value > 0
