"""Littlewood-Paley partitions, dyadic blocks and Besov norms."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import sympy as sp

from . import grids
from .errors import AliasingWarning, BandTooNarrow
from .kernels import Region, SmoothProduct, as_point, default_region, function_from_sympy
from .scans import (FINITE_SLOPE, TAIL_OCTAVES, LineFit, floor_below, lp_nodes, lp_norm, sup_pairings,
                    tail_slope)
from .testfn import dictionary

J_MAX = {1: 9, 2: 7}
N_OVERLAP = 1  # annulus ψ_j lives in 2^{j-N} <= |ξ| <= 2^{j+N}


def _smooth_step(t):
    """C^∞ step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def low_pass(r):
    """Radial profile: 1 on |ξ| <= 1, 0 on |ξ| >= 2, smooth in between."""
    return _smooth_step(2.0 - np.asarray(r, dtype=float))


def annulus(r):
    """ψ(ξ) = θ(ξ) - θ(2ξ), supported in 1/2 <= |ξ| <= 2."""
    return low_pass(r) - low_pass(2.0 * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class FrequencyGrid:
    n: int
    dim: int = 1

    @classmethod
    def default(cls, dim=1):
        return cls(grids.GRID_SIZE[dim], dim)

    @property
    def nyquist(self):
        return math.pi / grids.spacing(self.n)

    def norms(self):
        return grids.frequency_norm(self.n, self.dim)


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    grid: FrequencyGrid
    j_max: int
    multipliers: tuple
    N: int = N_OVERLAP

    @property
    def resolved_band(self):
        """Frequencies below which the multipliers sum to one."""
        return 2.0 ** self.j_max

    def total(self):
        return np.sum(self.multipliers, axis=0)


def build_partition(grid: Optional[FrequencyGrid] = None, j_max: Optional[int] = None,
                    dim: int = 1) -> DyadicPartition:
    grid = grid or FrequencyGrid.default(dim)
    if isinstance(grid, int):
        grid = FrequencyGrid(grid, dim)
    j_max = J_MAX[grid.dim] if j_max is None else int(j_max)
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    if 2.0 ** (j_max + N_OVERLAP) > grid.nyquist:
        octaves = int(math.floor(math.log2(grid.nyquist))) - N_OVERLAP
        raise BandTooNarrow(f"j_max={j_max} exceeds the {octaves} octaves resolved by "
                            f"an n={grid.n} grid (Nyquist {grid.nyquist:.1f})")
    r = grid.norms()
    mult = [low_pass(r)] + [annulus(r / 2.0 ** j) for j in range(1, j_max + 1)]
    return DyadicPartition(grid, j_max, tuple(mult))


def _spectrum(u, P):
    bl = (u.declared_exponents or {}).get("bandlimit")
    if bl is not None and bl > P.grid.nyquist:
        warnings.warn(f"{u.label} has spectral content up to {bl:g}, beyond the grid "
                      f"Nyquist frequency {P.grid.nyquist:.1f}", AliasingWarning, stacklevel=3)
    return np.fft.fftn(grids.render(u, P.grid.n))


def lp_block(u, P: DyadicPartition, j: int, _ft=None) -> np.ndarray:
    """Field ψ_j(D)u on the periodic grid."""
    if not 0 <= j <= P.j_max:
        raise ValueError(f"block index {j} outside 0..{P.j_max}")
    ft = _spectrum(u, P) if _ft is None else _ft
    return np.real(np.fft.ifftn(P.multipliers[j] * ft))


def _grid_lp(f, p, dim):
    if math.isinf(p):
        return float(np.max(np.abs(f)))
    h = grids.spacing(f.shape[0])
    return float((np.sum(np.abs(f) ** p) * h ** dim) ** (1.0 / p))


@dataclass
class BlockSeries:
    blocks: list
    norms: np.ndarray
    p: float

    def __post_init__(self):
        assert len(self.blocks) == len(self.norms)


def block_series(u, P: DyadicPartition, p=math.inf) -> BlockSeries:
    ft = _spectrum(u, P)
    blocks = [lp_block(u, P, j, ft) for j in range(P.j_max + 1)]
    return BlockSeries(blocks, np.array([_grid_lp(b, p, P.grid.dim) for b in blocks]), p)


@dataclass
class NormEstimate:
    """Truncated norm with its tail slope (log2 per octave) as a finiteness diagnostic."""

    value: float
    tail_slope: float
    terms: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def finite(self):
        return self.tail_slope <= FINITE_SLOPE

    def __float__(self):
        return float(self.value)


def _check_pq(p, q):
    for name, v in (("p", p), ("q", q)):
        if not (v >= 1):
            raise ValueError(f"{name} must lie in [1, inf], got {v}")


def _ell_q(terms, q):
    if math.isinf(q):
        return float(np.max(terms))
    return float(np.sum(terms ** q) ** (1.0 / q))


def _log2_tail(terms):
    t = np.asarray(terms, dtype=float)
    if not np.any(t > 0):
        return -math.inf
    return tail_slope(np.log2(np.maximum(t, 1e-300)))


def besov_norm(u, s: float, p=math.inf, q=math.inf, P: Optional[DyadicPartition] = None,
               series: Optional[BlockSeries] = None) -> NormEstimate:
    """ℓ^q over j of 2^{js} ‖ψ_j(D)u‖_{L^p}, truncated at j_max."""
    _check_pq(p, q)
    P = P or build_partition(dim=u.dim)
    series = series or block_series(u, P, p)
    j = np.arange(len(series.norms))
    terms = 2.0 ** (j * s) * series.norms
    return NormEstimate(_ell_q(terms, q), _log2_tail(terms), terms)


def _testfn_dictionary(alpha, dim, r):
    m = floor_below(alpha)
    if alpha < 0 or m < 0:
        return dictionary("plain", dim, r=r)
    return dictionary("moment_free", dim, m=m, r=r)


def scaled_norms(u, K: Region, p, ns, tests):
    """‖sup_φ |u(φ^{2^-n}_x)|‖_{L^p(x∈K)} for each n."""
    sing = u.singular_points()
    out = []
    for n in ns:
        lam = 2.0 ** -n
        x, w = lp_nodes(K, lam, sing)
        out.append(lp_norm(sup_pairings(u, tests, x, lam), w, p))
    return np.array(out)


def local_besov_norm(u, alpha: float, p=math.inf, K: Optional[Region] = None, n_max: int = 10,
                     n_min: int = 2, r: int = 2) -> NormEstimate:
    """sup_n 2^{nα} ‖sup_φ |u(φ^{2^-n}_x)|‖_{L^p(K)} over a fixed dictionary."""
    K = K or default_region(u.dim)
    ns = np.arange(n_min, n_max + 1)
    norms = scaled_norms(u, K, p, ns, _testfn_dictionary(alpha, u.dim, r))
    terms = 2.0 ** (ns * alpha) * norms
    return NormEstimate(float(np.max(terms)), _log2_tail(terms), terms, {"n": ns.tolist()})


# --------------------------------------------------------------------------
# critical exponents (norm-equivalence surrogate)


def localize(u, center=0.0, width=0.15):
    """Multiply by a narrow Gaussian.

    Its spectrum is negligible in the fitted octaves and it is ~1e-10 at
    the domain boundary, so periodic wrap-around plays no role.
    """
    c = as_point(center, u.dim)
    syms = sp.symbols(" ".join(f"y{i}" for i in range(u.dim)))
    syms = syms if isinstance(syms, tuple) else (syms,)
    r2 = sum((s - float(ci)) ** 2 for s, ci in zip(syms, c))
    chi = function_from_sympy(sp.exp(-r2 / (2 * width ** 2)), u.dim, (),
                              label=f"gauss@{center}")
    return SmoothProduct(dim=u.dim, factor=chi, inner=u, label=f"loc({u.label})")


def dyadic_critical_exponent(u, p=math.inf, P: Optional[DyadicPartition] = None,
                             octaves: int = TAIL_OCTAVES) -> LineFit:
    """Critical s: minus the growth rate of log2 ‖ψ_j(D)u‖_{L^p} over the top octaves."""
    P = P or build_partition(dim=u.dim)
    series = block_series(u, P, p)
    j = np.arange(P.j_max + 1)[-octaves:]
    fit = LineFit.of(j, np.log2(np.maximum(series.norms[-octaves:], 1e-300)))
    fit.slope = -fit.slope
    return fit


def testfn_critical_exponent(u, p=math.inf, K: Optional[Region] = None, n_min=4,
                             n_max=10, r=2) -> LineFit:
    """Critical α from the decay of scaled pairings.

    Plain bumps saturate at α = 0, so once the estimate reaches zero the
    fit is repeated with moment-free test functions of order max(0, ⌊α⌋).
    """
    K = K or default_region(u.dim)
    ns = np.arange(n_min, n_max + 1)
    tests = dictionary("plain", u.dim, r=r)
    seen = set()
    while True:
        norms = scaled_norms(u, K, p, ns, tests)
        if not np.any(norms > 1e-14 * max(1.0, norms.max())):
            return LineFit(math.inf, 0.0, 0.0, 0.0)
        fit = LineFit.of(ns, np.log2(np.maximum(norms, 1e-300)))
        fit.slope = -fit.slope
        if fit.slope < -FINITE_SLOPE:
            return fit
        # a dictionary annihilating degree <= m saturates at m + 1
        m = max(0, int(math.floor(fit.slope + FINITE_SLOPE)))
        if m in seen:
            return fit
        seen.add(m)
        tests = dictionary("moment_free", u.dim, m=m, r=r)


# --------------------------------------------------------------------------
# export


def export_block_table(path, u, P: Optional[DyadicPartition] = None, p=math.inf):
    """CSV of (j, block L^p norm) for plotting."""
    P = P or build_partition(dim=u.dim)
    series = block_series(u, P, p)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "block_norm", "p", "kernel"])
        for j, v in enumerate(series.norms):
            w.writerow([j, repr(float(v)), "inf" if math.isinf(p) else p, u.label])
    return path
