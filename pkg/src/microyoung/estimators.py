"""Estimator-style wrappers: ``fit`` on kernels, ``transform`` to exponent columns."""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import spectral
from .extension import scaling_degree
from .regularity import (DEFAULT_P, estimate_beta_star, estimate_holder_exponent,
                         estimate_local_sobolev)
from .validation import check_kernels, check_region, check_scales


class _ExponentEstimator(TransformerMixin, BaseEstimator):
    """Shared plumbing; subclasses implement ``_estimate(kernel) -> report``.

    ``X`` is a kernel, a kernel id, or a sequence of them.  After ``fit``,
    ``reports_`` holds one report per kernel and ``exponents_`` the values.
    """

    def _estimate(self, u):
        raise NotImplementedError

    def _value(self, report):
        return float(report.value)

    def fit(self, X, y=None):
        kernels = check_kernels(X, self.dim)
        self.reports_ = [self._estimate(u) for u in kernels]
        self.exponents_ = np.array([self._value(r) for r in self.reports_])
        self.labels_ = [u.label for u in kernels]
        return self

    def transform(self, X):
        check_is_fitted(self, "exponents_")
        kernels = check_kernels(X, self.dim)
        if [u.label for u in kernels] == self.labels_:
            return self.exponents_.reshape(-1, 1)
        return np.array([self._value(self._estimate(u)) for u in kernels]).reshape(-1, 1)


class HolderExponentEstimator(_ExponentEstimator):
    def __init__(self, region=None, n_min=2, n_max=10, r=2, dim=1):
        self.region = region
        self.n_min = n_min
        self.n_max = n_max
        self.r = r
        self.dim = dim

    def _estimate(self, u):
        scales = check_scales(np.arange(self.n_min, self.n_max + 1))
        return estimate_holder_exponent(u, check_region(self.region, self.dim), scales, self.r)


class BetaStarEstimator(_ExponentEstimator):
    def __init__(self, region=None, p_samples=DEFAULT_P, n_min=2, n_max=10, r=2, dim=1):
        self.region = region
        self.p_samples = p_samples
        self.n_min = n_min
        self.n_max = n_max
        self.r = r
        self.dim = dim

    def _estimate(self, u):
        scales = check_scales(np.arange(self.n_min, self.n_max + 1))
        return estimate_beta_star(u, check_region(self.region, self.dim), tuple(self.p_samples),
                                  scales, self.r)


class LocalSobolevEstimator(_ExponentEstimator):
    def __init__(self, x=0.0, radius=spectral.LOCALIZER_RADIUS, dim=1):
        self.x = x
        self.radius = radius
        self.dim = dim

    def _estimate(self, u):
        return estimate_local_sobolev(u, self.x, self.radius)


class ScalingDegreeEstimator(_ExponentEstimator):
    def __init__(self, x=0.0, n_min=2, n_max=10, dim=1):
        self.x = x
        self.n_min = n_min
        self.n_max = n_max
        self.dim = dim

    def _estimate(self, u):
        return scaling_degree(u, self.x, check_scales(np.arange(self.n_min, self.n_max + 1)))

    def _value(self, report):
        v = float(report.value)
        return v if not math.isnan(v) else math.inf
