"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import numbers

import numpy as np

from .catalog import parse_kernel
from .errors import DomainMismatch
from .kernels import DistributionExpr, Region, default_region


def check_kernel(u, dim=1):
    """Accept a kernel or a kernel id; return a kernel of dimension ``dim``."""
    if isinstance(u, str):
        u = parse_kernel(u, dim)
    if not isinstance(u, DistributionExpr):
        raise TypeError(f"expected a kernel or a kernel id, got {type(u).__name__}")
    if u.dim != dim:
        raise DomainMismatch(f"kernel {u.label} has dimension {u.dim}, expected {dim}")
    return u


def check_kernels(X, dim=1):
    """A single kernel/id or an iterable of them, as a list of kernels."""
    if isinstance(X, (str, DistributionExpr)):
        X = [X]
    out = [check_kernel(u, dim) for u in X]
    if not out:
        raise ValueError("no kernels given")
    return out


def check_scales(scales):
    s = np.asarray(scales)
    if s.ndim != 1 or s.size < 3:
        raise ValueError("need at least three dyadic scales")
    if not all(isinstance(v, numbers.Integral) for v in s.tolist()) or np.any(s < 1):
        raise ValueError("scales must be positive integers n (λ = 2^-n)")
    if np.any(np.diff(s) <= 0):
        raise ValueError("scales must be strictly increasing")
    return s


def check_region(K, dim=1):
    if K is None:
        return default_region(dim)
    if isinstance(K, Region):
        if K.dim != dim:
            raise DomainMismatch(f"region of dimension {K.dim} for a {dim}-dimensional kernel")
        return K
    lo, hi = K
    return Region.box(np.broadcast_to(np.asarray(lo, float), (dim,)),
                      np.broadcast_to(np.asarray(hi, float), (dim,)))
