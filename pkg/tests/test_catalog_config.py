import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from microyoung.catalog import CATALOG_1D, parse_kernel
from microyoung.config import RunConfig
from microyoung.errors import UnknownKernel
from microyoung.kernels import DiracDelta, PowerLaw, Sum, pair
from microyoung.testfn import make_bump


@pytest.mark.parametrize("kid", CATALOG_1D)
def test_catalog_ids_parse(kid):
    u = parse_kernel(kid)
    assert u.dim == 1


def test_delta_derivative_order_from_primes():
    d = parse_kernel("delta''@0.25")
    assert isinstance(d, DiracDelta) and d.order == 2 and d.center == (0.25,)


def test_weighted_sums():
    u = parse_kernel("2*delta@0+powerlaw@0.5:-0.5")
    assert isinstance(u, Sum)
    assert [w for w, _ in u.terms] == [2.0, 1.0]
    assert u.label == "2*delta@0+powerlaw@0.5:-0.5"


def test_exponent_notation_is_not_split():
    u = parse_kernel("2e+0*delta@0")
    assert isinstance(u, Sum) and u.terms[0][0] == 2.0 and len(u.terms) == 1


def test_two_dimensional_ids():
    assert parse_kernel("delta@0,0", 2).dim == 2
    assert parse_kernel("powerlaw@0:-0.5", 2).center == (0.0, 0.0)


@pytest.mark.parametrize("bad", ["", "gauss@0", "powerlaw@0", "delta@0,0,0", "logderiv@0"])
def test_unknown_ids(bad):
    dim = 2 if bad == "logderiv@0" else 1
    with pytest.raises(UnknownKernel):
        parse_kernel(bad, dim)


@given(c=st.floats(-0.9, 0.9).map(lambda v: round(v, 3)),
       a=st.floats(-0.95, -0.05).map(lambda v: round(v, 3)))
def test_powerlaw_label_round_trip(c, a):
    u = parse_kernel(f"powerlaw@{c}:{a}")
    v = parse_kernel(u.label)
    assert isinstance(v, PowerLaw)
    assert v.center == pytest.approx(u.center) and v.exponent == pytest.approx(u.exponent)


@given(c=st.floats(-0.9, 0.9).map(lambda v: round(v, 3)), k=st.integers(0, 3))
def test_delta_label_round_trip(c, k):
    u = parse_kernel(f"delta{chr(39) * k}@{c}")
    v = parse_kernel(u.label)
    assert v.center == pytest.approx(u.center) and v.order == u.order == k


def test_config_defaults_and_scales():
    cfg = RunConfig()
    assert cfg.scales == list(range(2, 11))
    assert cfg.output_dir == "."
    assert cfg.grid_size(2) == 512


@pytest.mark.parametrize("bad", [{"grid_1d": 100}, {"n_min": 5, "n_max": 6},
                                 {"p_samples": [0.5]}, {"margin": 2.0},
                                 {"dictionary": "wavelets"}])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        RunConfig.from_dict(bad)


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        RunConfig.from_dict({"grid": 4})


def test_config_file_round_trip(tmp_path):
    cfg = RunConfig(n_min=3, seed=4)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = RunConfig.from_file(path)
    assert back == cfg and math.isinf(back.p_samples[-1])
