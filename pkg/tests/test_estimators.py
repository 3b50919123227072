import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from microyoung.catalog import parse_kernel
from microyoung.estimators import (BetaStarEstimator, HolderExponentEstimator,
                                   LocalSobolevEstimator, ScalingDegreeEstimator)


def test_holder_estimator_fit_transform():
    est = HolderExponentEstimator()
    out = est.fit_transform(["delta@0", "powerlaw@0:-0.5"])
    assert out.shape == (2, 1)
    assert out[:, 0] == pytest.approx([-1.0, -0.5], abs=0.05)
    assert est.labels_ == ["delta@0", "powerlaw@0:-0.5"]


def test_beta_star_estimator_accepts_kernel_objects():
    est = BetaStarEstimator(p_samples=(2.0,)).fit([parse_kernel("delta@0")])
    assert est.exponents_[0] == pytest.approx(-0.5, abs=0.05)
    assert est.reports_[0].p_table.keys() == {"2"}


def test_transform_on_new_kernels():
    est = ScalingDegreeEstimator().fit(["delta@0"])
    out = est.transform(["delta'@0"])
    assert out[0, 0] == pytest.approx(2.0, abs=0.05)


def test_sobolev_estimator_reports_infinity_for_smooth_kernels():
    out = LocalSobolevEstimator(x=0.6).fit_transform(["delta@0"])
    assert math.isinf(out[0, 0])


def test_params_and_clone():
    est = HolderExponentEstimator(n_min=3, r=1)
    params = est.get_params()
    assert params["n_min"] == 3 and params["r"] == 1
    c = clone(est).set_params(n_max=9)
    assert c.n_max == 9 and est.n_max == 10


def test_transform_before_fit():
    with pytest.raises(NotFittedError):
        HolderExponentEstimator().transform(["delta@0"])


def test_bad_inputs():
    with pytest.raises((TypeError, ValueError)):
        HolderExponentEstimator().fit([3.0])
    with pytest.raises(ValueError):
        HolderExponentEstimator(n_min=5, n_max=4).fit(["delta@0"])
