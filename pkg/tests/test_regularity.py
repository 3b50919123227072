import math

import numpy as np
import pytest

from microyoung.catalog import parse_kernel
from microyoung.kernels import Region, cusp
from microyoung.regularity import (estimate_beta_star, estimate_holder_exponent,
                                   estimate_local_sobolev, holder_norm, taylor_remainders)


@pytest.mark.parametrize("kid,expect,tol", [("delta@0", -1.0, 0.05), ("delta'@0", -2.0, 0.05),
                                             ("powerlaw@0:-0.5", -0.5, 0.05),
                                             ("logderiv@0", -1.0, 0.05)])
def test_negative_holder_exponents(kid, expect, tol):
    rep = estimate_holder_exponent(parse_kernel(kid))
    assert rep.value == pytest.approx(expect, abs=tol)
    assert rep.diagnostics["branch"] == "negative"


@pytest.mark.parametrize("a", [0.6, 1.5])
def test_positive_holder_exponents(a):
    assert estimate_holder_exponent(cusp(0.0, a)).value == pytest.approx(a, abs=0.1)


def test_smooth_kernel_reports_infinite_exponent():
    rep = estimate_holder_exponent(parse_kernel("constant-1"))
    assert rep.smooth


def test_region_away_from_singularity_is_smooth():
    K = Region.box([0.3], [0.7])
    rep = estimate_holder_exponent(parse_kernel("powerlaw@0:-0.5"), K)
    # plain tests saturate at zero and a power law has no closed-form jet
    assert rep.value == pytest.approx(0.0, abs=0.05)
    assert rep.diagnostics["positive_branch"] == "unavailable"


def test_taylor_remainders_decay_with_order():
    ns = np.arange(4, 11)
    rows = taylor_remainders(cusp(0.0, 1.5), Region.box([-0.5], [0.5]), 1, ns)
    slope = np.polyfit(-ns * math.log(2), np.log(rows), 1)[0]
    assert slope == pytest.approx(1.5, abs=0.05)


def test_beta_star_table_and_clamp():
    rep = estimate_beta_star(parse_kernel("delta@0"))
    assert set(rep.p_table) == {"2", "4", "8", "inf"}
    assert rep.p_table["inf"]["gamma"] == pytest.approx(-1.0, abs=0.05)
    smooth = estimate_beta_star(parse_kernel("bump@0:0.5"))
    assert smooth.value <= 0.0


def test_beta_star_rejects_small_p():
    with pytest.raises(ValueError):
        estimate_beta_star(parse_kernel("delta@0"), p_samples=(1.0,))


def test_local_sobolev_of_delta():
    assert estimate_local_sobolev(parse_kernel("delta@0"), 0.0).value == pytest.approx(-0.5,
                                                                                      abs=0.05)


def test_local_sobolev_away_from_singularity_is_infinite():
    assert math.isinf(estimate_local_sobolev(parse_kernel("delta@0"), 0.6).value)


def test_holder_norm_grows_with_exponent():
    u = parse_kernel("delta@0")
    assert holder_norm(u, -0.5) > holder_norm(u, -1.0)


def test_report_json_roundtrip():
    import json
    rep = estimate_holder_exponent(parse_kernel("delta@0"))
    d = json.loads(rep.to_json())
    assert d["kind"] == "holder" and d["value"] == pytest.approx(rep.value)
