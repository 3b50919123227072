"""Compactly supported test functions: bumps, moment-free bumps, rescalings.

Every test-like object exposes ``dim``, ``center``, ``radius`` (the support
lies in the closed ball of that radius around ``center``), ``__call__(y)``
and ``deriv(k, y)`` for a multi-index ``k``.  Points are arrays of shape
``(n,)`` in one dimension and ``(n, 2)`` in two.
"""
from __future__ import annotations

import functools
import itertools
import math

import numpy as np
import sympy as sp

CR_GRID = 4096
# 2D sup norms use a coarser grid; 4096**2 evaluations per derivative is too slow
CR_GRID_2D = 1024


def as_points(y, dim):
    """Return ``(points of shape (n, dim), output shape)``."""
    y = np.asarray(y, dtype=float)
    if dim == 1:
        return y.reshape(-1, 1), y.shape
    if y.shape[-1] != dim:
        raise ValueError(f"expected points with trailing axis {dim}, got {y.shape}")
    return y.reshape(-1, dim), y.shape[:-1]


def multi_indices(dim, max_order):
    """All multi-indices of length ``dim`` with total order <= max_order."""
    return [k for k in itertools.product(range(max_order + 1), repeat=dim)
            if sum(k) <= max_order]


def normalize_index(k, dim):
    if isinstance(k, (int, np.integer)):
        k = (int(k),)
    k = tuple(int(v) for v in k)
    if len(k) == 0:
        k = (0,) * dim
    if len(k) != dim:
        raise ValueError(f"multi-index {k} does not match dimension {dim}")
    return k


class Profile:
    """Symbolic unit-scale profile with a support predicate.

    ``kind`` is ``"radial"`` (support |t| < 1) or ``"tensor"`` (support
    max|t_i| < 1/sqrt(2), so still inside the unit ball).
    """

    def __init__(self, expr, symbols, kind, label):
        self.expr = expr
        self.symbols = tuple(symbols)
        self.kind = kind
        self.label = label
        self.dim = len(self.symbols)

    @functools.lru_cache(maxsize=None)
    def _compiled(self, k):
        e = self.expr
        for sym, order in zip(self.symbols, k):
            if order:
                e = sp.diff(e, sym, order)
        return sp.lambdify(self.symbols, e, "numpy"), sp.lambdify(self.symbols, e, "math")

    def _inside(self, t):
        if self.kind == "radial":
            return np.sum(t * t, axis=1) < 1.0
        return np.all(np.abs(t) < 1.0 / math.sqrt(2.0), axis=1)

    def evaluate(self, k, t):
        """Derivative ``k`` of the profile at unit points ``t`` (n, dim)."""
        out = np.zeros(t.shape[0])
        mask = self._inside(t)
        if t.shape[0] == 1 and mask[0]:
            try:
                v = float(self._compiled(k)[1](*t[0]))
                out[0] = v if math.isfinite(v) else 0.0
                return out
            except (ArithmeticError, ValueError, TypeError):
                pass
        if np.any(mask):
            f = self._compiled(k)[0]
            with np.errstate(all="ignore"):
                vals = f(*[t[mask, i] for i in range(self.dim)])
            vals = np.broadcast_to(np.asarray(vals, dtype=float), (int(mask.sum()),))
            out[mask] = np.nan_to_num(vals, nan=0.0, posinf=0.0, neginf=0.0)
        return out

    @functools.lru_cache(maxsize=None)
    def sup_table(self, max_order):
        """sup |d^k profile| over a fine grid, keyed by multi-index."""
        axis = np.linspace(-1.0, 1.0, CR_GRID if self.dim == 1 else CR_GRID_2D)
        table = {}
        for k in multi_indices(self.dim, max_order):
            if self.dim == 1:
                table[k] = float(np.max(np.abs(self.evaluate(k, axis[:, None]))))
            else:
                best = 0.0
                for chunk in np.array_split(axis, 16):
                    g1, g2 = np.meshgrid(chunk, axis, indexing="ij")
                    t = np.column_stack([g1.ravel(), g2.ravel()])
                    best = max(best, float(np.max(np.abs(self.evaluate(k, t)))))
                table[k] = best
        return table

    def __hash__(self):
        return hash((self.label, self.dim))

    def __eq__(self, other):
        return isinstance(other, Profile) and (self.label, self.dim) == (other.label, other.dim)


@functools.lru_cache(maxsize=None)
def bump_profile(dim, sharpness=1.0):
    ts = sp.symbols(" ".join(f"t{i}" for i in range(dim)), real=True)
    ts = ts if isinstance(ts, tuple) else (ts,)
    r2 = sum(t ** 2 for t in ts)
    expr = sp.exp(-sp.nsimplify(sharpness) / (1 - r2))
    return Profile(expr, ts, "radial", f"bump{dim}:s{sharpness}")


@functools.lru_cache(maxsize=None)
def moment_free_profile(dim, n_derivatives, sharpness=1.0):
    t = sp.Symbol("t", real=True)
    factor = sp.diff(sp.exp(-sp.nsimplify(sharpness) / (1 - t ** 2)), t, n_derivatives)
    if dim == 1:
        return Profile(factor, (t,), "radial", f"mf1:n{n_derivatives}:s{sharpness}")
    t0, t1 = sp.symbols("t0 t1", real=True)
    # factors rescaled so the tensor support stays inside the unit ball
    s2 = sp.sqrt(2)
    expr = factor.subs(t, s2 * t0) * factor.subs(t, s2 * t1)
    return Profile(expr, (t0, t1), "tensor", f"mf2:n{n_derivatives}:s{sharpness}")


class TestFunction:
    """``amplitude * profile((y - center) / radius)``."""

    __test__ = False

    def __init__(self, profile, radius=1.0, center=None, amplitude=1.0,
                 r_max=2, annihilated_moment_order=-1, label=None):
        self.profile = profile
        self.dim = profile.dim
        self.radius = float(radius)
        self.center = np.zeros(self.dim) if center is None else np.atleast_1d(
            np.asarray(center, dtype=float))
        self.amplitude = float(amplitude)
        self.r_max = int(r_max)
        self.annihilated_moment_order = int(annihilated_moment_order)
        self.label = label or profile.label

    @property
    def max_order(self):
        return self.r_max

    def deriv(self, k, y):
        k = normalize_index(k, self.dim)
        pts, shape = as_points(y, self.dim)
        t = (pts - self.center) / self.radius
        scale = self.amplitude * self.radius ** (-sum(k))
        return (scale * self.profile.evaluate(k, t)).reshape(shape)

    def __call__(self, y):
        return self.deriv((0,) * self.dim, y)

    @property
    def cr_norms(self):
        table = self.profile.sup_table(self.r_max)
        norms = []
        for r in range(self.r_max + 1):
            norms.append(max(abs(self.amplitude) * self.radius ** (-sum(k)) * v
                             for k, v in table.items() if sum(k) <= r))
        return norms

    def __repr__(self):
        return (f"TestFunction({self.label}, radius={self.radius:g}, "
                f"center={self.center.tolist()}, amplitude={self.amplitude:.6g})")


class ScaledTestFunction(TestFunction):
    """``lam**-d * base((y - x) / lam)``."""

    def __init__(self, base, lam, x):
        if not 0.0 < lam <= 1.0 + 1e-12:
            raise ValueError(f"scale must lie in (0, 1], got {lam}")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        super().__init__(base.profile, radius=base.radius * lam,
                         center=x + lam * base.center,
                         amplitude=base.amplitude * lam ** (-base.dim),
                         r_max=base.r_max,
                         annihilated_moment_order=base.annihilated_moment_order,
                         label=base.label)
        self.base = base
        self.lam = float(lam)
        self.x = x


def scale_translate(phi, lam, x):
    return ScaledTestFunction(phi, lam, x)


class TestProduct:
    """Pointwise product ``f * phi`` of a function kernel and a test function."""

    __test__ = False

    def __init__(self, factor, test):
        self.factor = factor
        self.test = test
        self.dim = test.dim
        self.center = test.center
        self.radius = test.radius

    def deriv(self, k, y):
        k = normalize_index(k, self.dim)
        total = 0.0
        for j in itertools.product(*[range(ki + 1) for ki in k]):
            rest = tuple(ki - ji for ki, ji in zip(k, j))
            coeff = math.prod(math.comb(ki, ji) for ki, ji in zip(k, j))
            total = total + coeff * self.factor.deriv(j, y) * self.test.deriv(rest, y)
        return total

    def __call__(self, y):
        return self.factor.deriv((0,) * self.dim, y) * self.test(y)


class TestCombination:
    """Finite linear combination of test-like objects."""

    __test__ = False

    def __init__(self, terms):
        self.terms = [(float(c), t) for c, t in terms]
        self.dim = self.terms[0][1].dim
        centers = np.array([t.center for _, t in self.terms])
        lo = np.min(centers - np.array([[t.radius] for _, t in self.terms]), axis=0)
        hi = np.max(centers + np.array([[t.radius] for _, t in self.terms]), axis=0)
        self.center = 0.5 * (lo + hi)
        self.radius = float(np.max([np.linalg.norm(t.center - self.center) + t.radius
                                    for _, t in self.terms]))

    def deriv(self, k, y):
        return sum(c * t.deriv(k, y) for c, t in self.terms)

    def __call__(self, y):
        return self.deriv((0,) * self.dim, y)


def _normalized(profile, radius, r, annihilated, label):
    phi = TestFunction(profile, radius=radius, r_max=r,
                       annihilated_moment_order=annihilated, label=label)
    norm = phi.cr_norms[r]
    phi.amplitude = 1.0 / norm if norm > 0 else 1.0
    return phi


def make_bump(radius=1.0, r=2, dim=1, sharpness=1.0):
    """Positive bump ``exp(-s / (1 - |y/radius|^2))`` scaled to unit C^r norm."""
    if radius <= 0 or r < 0:
        raise ValueError("radius must be positive and r non-negative")
    return _normalized(bump_profile(dim, sharpness), radius, r, -1,
                       f"bump:r{r}:R{radius:g}:s{sharpness:g}")


def make_moment_free(m, r=2, radius=1.0, dim=1, sharpness=1.0, n_derivatives=None):
    """Bump derivative annihilating every moment of order <= m.

    In 1D this is the ``n_derivatives``-th derivative of a bump (default
    ``m + 1``); in 2D it is the tensor product of two such 1D factors.
    """
    if m < 0:
        raise ValueError("moment order must be >= 0")
    n = m + 1 if n_derivatives is None else int(n_derivatives)
    if n < m + 1:
        raise ValueError("need at least m + 1 derivatives to annihilate m moments")
    return _normalized(moment_free_profile(dim, n, sharpness), radius, r, m,
                       f"momfree:m{m}:r{r}:n{n}:R{radius:g}")


def cr_norm(phi, r):
    """max over |k| <= r of sup |d^k phi|, sampled on a 4096-point grid per axis."""
    if isinstance(phi, TestFunction):
        if r > phi.r_max:
            raise ValueError(f"r={r} exceeds r_max={phi.r_max}")
        return phi.cr_norms[r]
    axis = np.linspace(-1.0, 1.0, CR_GRID if phi.dim == 1 else CR_GRID_2D)
    if phi.dim == 1:
        pts = phi.center[0] + phi.radius * axis
    else:
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        pts = phi.center + phi.radius * np.column_stack([g1.ravel(), g2.ravel()])
    return max(float(np.max(np.abs(phi.deriv(k, pts)))) for k in multi_indices(phi.dim, r))


class ZeroFunction:
    """The zero test function; useful as a degenerate input."""

    def __init__(self, dim=1):
        self.dim = dim
        self.center = np.zeros(dim)
        self.radius = 1.0

    def deriv(self, k, y):
        _, shape = as_points(y, self.dim)
        return np.zeros(shape)

    def __call__(self, y):
        return self.deriv((0,) * self.dim, y)


# (radius, sharpness) of the fixed plain dictionary
PLAIN_SHAPES = ((1.0, 1.0), (1.0, 0.5), (1.0, 2.0), (0.75, 1.0), (0.5, 1.0))


@functools.lru_cache(maxsize=None)
def plain_dictionary(dim=1, r=2):
    return tuple(make_bump(R, r, dim=dim, sharpness=s) for R, s in PLAIN_SHAPES)


@functools.lru_cache(maxsize=None)
def moment_free_dictionary(m, dim=1, r=2):
    """Derivatives of order m+1 and m+2 of the first three plain shapes.

    Both orders annihilate moments up to m; mixing parities keeps the
    dictionary sensitive to even and odd local behaviour.
    """
    out = []
    for R, s in PLAIN_SHAPES[:3]:
        for n in (m + 1, m + 2):
            out.append(make_moment_free(m, r, radius=R, dim=dim, sharpness=s, n_derivatives=n))
    return tuple(out)


def _reflected(a, dim):
    # closed under y -> -y so either scaling convention gives the same sup
    if dim == 1:
        return [(a,), (-a,)]
    return [(a, 0.0), (-a, 0.0), (0.0, a), (0.0, -a)]


@functools.lru_cache(maxsize=None)
def punctured_dictionary(dim=1, r=2):
    """Bumps whose support avoids a neighbourhood of the origin."""
    base = make_bump(0.25, r, dim=dim)
    centers = _reflected(0.6, dim)
    return tuple(TestFunction(base.profile, radius=0.25, center=c, amplitude=base.amplitude,
                              r_max=base.r_max, label=f"offcenter@{c}") for c in centers)


@functools.lru_cache(maxsize=None)
def offcenter_dictionary(dim=1, r=2):
    """Plain bumps plus half-radius bumps shifted off the origin.

    Shifting breaks the even symmetry, so derivatives of point masses are
    seen at a fixed base point.
    """
    base = make_bump(0.5, r, dim=dim)
    shifts = _reflected(0.4, dim)
    shifted = tuple(TestFunction(base.profile, radius=0.5, center=c, amplitude=base.amplitude,
                                 r_max=base.r_max, label=f"shifted@{c}") for c in shifts)
    return plain_dictionary(dim, r) + shifted


def dictionary(kind, dim=1, m=0, r=2):
    if kind == "plain":
        return plain_dictionary(dim, r)
    if kind == "moment_free":
        return moment_free_dictionary(m, dim, r)
    if kind == "offcenter":
        return offcenter_dictionary(dim, r)
    if kind == "punctured":
        return punctured_dictionary(dim, r)
    raise ValueError(f"unknown dictionary kind {kind!r}")
