import math

import numpy as np
import pytest

from microyoung.catalog import parse_kernel
from microyoung.wavefront import (Cone, cone_energy, critical_sobolev_direction,
                                  pairwise_product_criterion, wavefront_set)


def test_delta_is_singular_in_every_direction():
    rep = wavefront_set(parse_kernel("delta@0"), [0.0], s=0.0)
    assert len(rep.flagged()) == 2


def test_smooth_point_is_not_flagged():
    rep = wavefront_set(parse_kernel("delta@0"), [0.6], s=0.0)
    assert rep.flagged() == []
    assert all(math.isinf(e.critical_s) for e in rep.entries)


def test_two_dimensional_delta_index():
    s = critical_sobolev_direction(parse_kernel("delta@0", 2), (0.0, 0.0), (1.0, 0.0))
    assert s == pytest.approx(-1.0, abs=0.1)


def test_power_law_index():
    s = critical_sobolev_direction(parse_kernel("powerlaw@0:-0.75"), 0.0, (1.0,))
    assert s == pytest.approx(-0.25, abs=0.1)


def test_cone_energy_is_finite_below_critical_index():
    u = parse_kernel("delta@0")
    lo = cone_energy(u, 0.0, Cone((1.0,)), -1.0)
    hi = cone_energy(u, 0.0, Cone((1.0,)), 0.0)
    assert lo.finite and not hi.finite


def test_product_criterion_fails_for_delta_squared():
    d = parse_kernel("delta@0")
    assert pairwise_product_criterion(d, d, [0.0]).decision == "fail"


def test_product_criterion_passes_for_cusp_times_delta():
    res = pairwise_product_criterion(parse_kernel("cusp@0:1.5"), parse_kernel("delta@0"), [0.0])
    assert res.decision == "pass"


def test_report_serializes(tmp_path):
    rep = wavefront_set(parse_kernel("delta@0"), [0.0], s=-1.0)
    d = rep.to_dict()
    assert d["s_queried"] == -1.0
    assert rep.to_csv(tmp_path / "wf.csv").exists()
    xs, ds, m = rep.critical_map()
    assert m.shape == (1, 2)
