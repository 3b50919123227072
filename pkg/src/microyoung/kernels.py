"""Distribution kernels on the box [-1, 1)^d and their dual pairings."""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import sympy as sp
from scipy import integrate

from .errors import DomainMismatch, InsufficientDerivatives, NonIntegrableSingularity
from .testfn import TestFunction, TestProduct, as_points, normalize_index, scale_translate

DOMAIN_LOWER = -1.0
DOMAIN_UPPER = 1.0
EVERYWHERE = "everywhere"

QUAD_EPSREL = 1e-11
QUAD_LIMIT = 400
N_ANGLES = 512


def as_point(c, dim):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size == 1 and dim == 2:
        c = np.full(2, float(c[0]))
    if c.size != dim:
        raise DomainMismatch(f"point {c.tolist()} does not have dimension {dim}")
    return c


# --------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """Box, punctured region, or r-enlargement of another region."""

    kind: str
    lower: tuple = ()
    upper: tuple = ()
    base: Optional["Region"] = None
    point: tuple = ()
    r: float = 0.0

    @classmethod
    def box(cls, lower, upper):
        lower = tuple(float(v) for v in np.atleast_1d(lower))
        upper = tuple(float(v) for v in np.atleast_1d(upper))
        if len(lower) != len(upper) or any(a > b for a, b in zip(lower, upper)):
            raise ValueError("box bounds must have equal length and lower <= upper")
        return cls("box", lower=lower, upper=upper)

    @classmethod
    def centered(cls, center, half_width):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls.box(c - half_width, c + half_width)

    def punctured(self, point):
        return Region("punctured", base=self, point=tuple(np.atleast_1d(point).astype(float)))

    def enlargement(self, r):
        return Region("enlarged", base=self, r=float(r))

    @property
    def dim(self):
        return len(self.lower) if self.kind == "box" else self.base.dim

    def bounding_box(self):
        if self.kind == "box":
            return np.array(self.lower), np.array(self.upper)
        lo, hi = self.base.bounding_box()
        if self.kind == "enlarged":
            return lo - self.r, hi + self.r
        return lo, hi

    def distance(self, points):
        """Euclidean distance from each point to the region."""
        pts, shape = as_points(points, self.dim)
        if self.kind == "box":
            lo, hi = np.array(self.lower), np.array(self.upper)
            gap = np.maximum(np.maximum(lo - pts, pts - hi), 0.0)
            return np.linalg.norm(gap, axis=1).reshape(shape)
        if self.kind == "enlarged":
            return np.maximum(self.base.distance(points) - self.r, 0.0)
        return self.base.distance(points)

    def contains(self, points, tol=1e-12):
        inside = self.distance(points) <= tol
        if self.kind == "punctured":
            pts, shape = as_points(points, self.dim)
            away = np.linalg.norm(pts - np.array(self.point), axis=1) > tol
            inside = inside & away.reshape(shape)
        return inside

    def clipped(self):
        """Bounding box intersected with the computational domain."""
        lo, hi = self.bounding_box()
        return np.maximum(lo, DOMAIN_LOWER), np.minimum(hi, DOMAIN_UPPER)

    def sample(self, n_per_axis=33):
        """Uniform sample of the (clipped) region, shape (n, dim) or (n,)."""
        lo, hi = self.clipped()
        axes = [np.linspace(a, b, n_per_axis) for a, b in zip(lo, hi)]
        if self.dim == 1:
            pts = axes[0]
        else:
            g = np.meshgrid(*axes, indexing="ij")
            pts = np.column_stack([v.ravel() for v in g])
        keep = self.contains(pts)
        return pts[keep]

    def to_dict(self):
        out = {"kind": self.kind}
        if self.kind == "box":
            out.update(lower=list(self.lower), upper=list(self.upper))
        else:
            out["base"] = self.base.to_dict()
            if self.kind == "punctured":
                out["point"] = list(self.point)
            else:
                out["r"] = self.r
        return out


def default_region(dim):
    return Region.box([-0.5] * dim, [0.5] * dim)


# --------------------------------------------------------------------------
# quadrature


def _scalar(fn, dim):
    if dim == 1:
        return lambda y: float(fn(np.array([y]))[0])
    raise ValueError("scalar wrapper is 1D only")


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=kw.pop("epsabs", 0.0),
                                epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, **kw)
    return val


def _epsabs(test):
    scale = abs(getattr(test, "amplitude", 1.0)) * (2 * test.radius) ** test.dim
    return 1e-14 * max(scale, 1e-300)


def integrate_1d(g, lo, hi, c=None, exponent=0.0, log=False, epsabs=0.0, points=()):
    """Integrate ``g(y) * w(y)`` over [lo, hi]; w = |y - c|**exponent or log|y - c|.

    The weight is handled by QUADPACK's algebraic/logarithmic endpoint
    rules after splitting at ``c``.
    """
    if hi <= lo:
        return 0.0
    if c is None or (exponent == 0.0 and not log):
        inner = [p for p in points if lo < p < hi]
        return _quad(g, lo, hi, points=inner or None, epsabs=epsabs)
    if lo < c < hi:
        left = integrate_1d(g, lo, c, c, exponent, log, epsabs)
        right = integrate_1d(g, c, hi, c, exponent, log, epsabs)
        return left + right
    if c <= lo:
        wtype = "alg-loga" if log else "alg"
        wvar = (0.0, 0.0) if log else (exponent, 0.0)
        if c < lo:
            if log:
                return _quad(lambda y: g(y) * math.log(y - c), lo, hi, epsabs=epsabs)
            return _quad(lambda y: g(y) * (y - c) ** exponent, lo, hi, epsabs=epsabs)
        return _quad(g, lo, hi, weight=wtype, wvar=wvar, epsabs=epsabs)
    # c >= hi
    if c > hi:
        if log:
            return _quad(lambda y: g(y) * math.log(c - y), lo, hi, epsabs=epsabs)
        return _quad(lambda y: g(y) * (c - y) ** exponent, lo, hi, epsabs=epsabs)
    wtype = "alg-logb" if log else "alg"
    wvar = (0.0, 0.0) if log else (0.0, exponent)
    return _quad(g, lo, hi, weight=wtype, wvar=wvar, epsabs=epsabs)


def integrate_polar(g, c, center, radius, exponent=0.0, epsabs=0.0, n_angles=N_ANGLES):
    """2D integral of ``g(y) |y - c|**exponent`` over the ball B(center, radius).

    Polar coordinates about ``c``: trapezoid in angle, QUADPACK in radius
    with an algebraic weight when the ball contains ``c``.
    """
    c = np.asarray(c, dtype=float)
    dist = float(np.linalg.norm(np.asarray(center) - c))
    r0, r1 = max(0.0, dist - radius), dist + radius
    theta = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    e = np.column_stack([np.cos(theta), np.sin(theta)])
    dtheta = 2 * np.pi / n_angles

    def ring(r):
        return float(np.sum(g(c + r * e))) * dtheta

    if r0 == 0.0:
        if exponent + 2.0 <= 0.0:
            raise NonIntegrableSingularity(
                f"|y|^{exponent} is not integrable in 2D near {c.tolist()}")
        return _quad(ring, 0.0, r1, weight="alg", wvar=(exponent + 1.0, 0.0), epsabs=epsabs)
    return _quad(lambda r: ring(r) * r ** (exponent + 1.0), r0, r1, epsabs=epsabs)


# --------------------------------------------------------------------------
# kernels


@dataclass(frozen=True, eq=False)
class DistributionExpr:
    dim: int
    declared_singsupp: object = ()
    declared_exponents: Optional[dict] = None
    label: str = ""

    def singular_points(self):
        if self.declared_singsupp == EVERYWHERE:
            return []
        return [as_point(p, self.dim) for p in self.declared_singsupp]

    @property
    def singular_everywhere(self):
        return self.declared_singsupp == EVERYWHERE

    def pair(self, test):
        raise NotImplementedError

    def __add__(self, other):
        return Sum(dim=self.dim, terms=((1.0, self), (1.0, other)))

    def __rmul__(self, a):
        return Sum(dim=self.dim, terms=((float(a), self),))


def _singsupp(points, dim):
    return tuple(tuple(as_point(p, dim).tolist()) for p in points)


@dataclass(frozen=True, eq=False)
class PowerLaw(DistributionExpr):
    """``|y - center|**exponent``; only paired away from center if exponent <= -dim."""

    center: tuple = (0.0,)
    exponent: float = -0.5

    @classmethod
    def make(cls, center=0.0, exponent=-0.5, dim=1):
        c = as_point(center, dim)
        return cls(dim=dim, declared_singsupp=_singsupp([c], dim),
                   declared_exponents={"holder": exponent, "scaling_degree": -exponent},
                   label=f"powerlaw@{_fmt(c)}:{exponent:g}", center=tuple(c.tolist()),
                   exponent=float(exponent))

    @property
    def integrable(self):
        return self.exponent > -self.dim

    def __call__(self, y):
        pts, shape = as_points(y, self.dim)
        with np.errstate(divide="ignore"):
            return (np.linalg.norm(pts - np.array(self.center), axis=1) ** self.exponent).reshape(shape)

    def pair(self, test):
        c = np.array(self.center)
        exponent = self.exponent
        scale = 1.0
        # merge a matching cusp factor |y - c|^b into the singular weight
        if isinstance(test, TestProduct) and getattr(test.factor, "cusp", None) is not None:
            cc, b, s = test.factor.cusp
            if np.allclose(cc, c):
                exponent, scale, test = exponent + b, s, test.test
        covers = np.linalg.norm(c - test.center) < test.radius
        if covers and exponent <= -self.dim:
            raise NonIntegrableSingularity(
                f"{self.label} (exponent {exponent:g}) paired with a test function "
                f"not vanishing near its center")
        eps = _epsabs(test)
        if self.dim == 1:
            lo, hi = test.center[0] - test.radius, test.center[0] + test.radius
            return scale * integrate_1d(_scalar(test, 1), lo, hi, c[0], exponent, epsabs=eps)
        return scale * integrate_polar(lambda p: test(p), c, test.center, test.radius,
                                       exponent, epsabs=eps)


@dataclass(frozen=True, eq=False)
class DiracDelta(DistributionExpr):
    """``(-1)^|k| d^k phi(center)``."""

    center: tuple = (0.0,)
    derivative: tuple = ()

    @classmethod
    def make(cls, center=0.0, derivative=(), dim=1):
        c = as_point(center, dim)
        k = normalize_index(derivative, dim) if derivative != () else (0,) * dim
        order = sum(k)
        return cls(dim=dim, declared_singsupp=_singsupp([c], dim),
                   declared_exponents={"holder": -dim - order, "beta_star": -dim / 2 - order,
                                       "scaling_degree": dim + order},
                   label=("delta" if order == 0 else "delta" + "'" * order) + f"@{_fmt(c)}",
                   center=tuple(c.tolist()), derivative=k)

    @property
    def order(self):
        return sum(self.derivative)

    def pair(self, test):
        c = np.array(self.center)
        val = test.deriv(self.derivative, c[None, :] if self.dim > 1 else c)
        return float((-1) ** self.order * np.asarray(val).ravel()[0])


@dataclass(frozen=True, eq=False)
class LogDerivative(DistributionExpr):
    """d/dy log|y - c| in 1D, paired as ``-int log|y - c| phi'(y) dy``."""

    center: tuple = (0.0,)

    @classmethod
    def make(cls, center=0.0):
        c = as_point(center, 1)
        return cls(dim=1, declared_singsupp=_singsupp([c], 1),
                   declared_exponents={"holder": -1.0, "scaling_degree": 1.0},
                   label=f"logderiv@{_fmt(c)}", center=tuple(c.tolist()))

    def pair(self, test):
        c = self.center[0]
        lo, hi = test.center[0] - test.radius, test.center[0] + test.radius
        dphi = lambda y: float(test.deriv((1,), np.array([y]))[0])
        return -integrate_1d(dphi, lo, hi, c, log=True, epsabs=_epsabs(test))


@dataclass(frozen=True, eq=False)
class SmoothFunction(DistributionExpr):
    """Function kernel given by a closed form with derivatives.

    Despite the name, the closed form may have finitely many declared
    singular points (cusps); ``max_derivative`` bounds the derivative
    order that is valid everywhere (``None`` means unbounded).
    """

    func: Callable = None
    derivative_fn: Callable = None
    max_derivative: Optional[int] = None
    cusp: Optional[tuple] = None

    def __call__(self, y):
        return self.func(y)

    def deriv(self, k, y):
        k = normalize_index(k, self.dim)
        if sum(k) == 0:
            return self.func(y)
        if self.derivative_fn is None:
            raise InsufficientDerivatives(f"{self.label} has no derivative evaluator")
        if self.max_derivative is not None and sum(k) > self.max_derivative:
            raise InsufficientDerivatives(
                f"{self.label} has only {self.max_derivative} derivatives")
        return self.derivative_fn(k, y)

    def piecewise_deriv(self, k, y):
        """∂^k away from the declared singular points, ignoring ``max_derivative``."""
        k = normalize_index(k, self.dim)
        return self.func(y) if sum(k) == 0 else self.derivative_fn(k, y)

    def pair(self, test):
        sing = [p for p in self.singular_points()
                if np.linalg.norm(p - test.center) < test.radius]
        prod = lambda y: self.func(y) * test(y)
        eps = _epsabs(test)
        if self.dim == 1:
            lo, hi = test.center[0] - test.radius, test.center[0] + test.radius
            return integrate_1d(_scalar(prod, 1), lo, hi, epsabs=eps,
                                points=[p[0] for p in sing])
        c = sing[0] if sing else test.center
        return integrate_polar(prod, c, test.center, test.radius, epsabs=eps)


@dataclass(frozen=True, eq=False)
class GridField(DistributionExpr):
    """Samples on the periodic grid ``lower + i * spacing`` covering the domain."""

    samples: np.ndarray = None
    domain: Region = None
    spacing: float = 0.0

    @classmethod
    def make(cls, samples, singsupp=EVERYWHERE, label="grid", exponents=None):
        samples = np.asarray(samples, dtype=float)
        dim = samples.ndim
        for n in samples.shape:
            if n & (n - 1) or n < 2:
                raise ValueError(f"grid sizes must be powers of two, got {samples.shape}")
        if len(set(samples.shape)) != 1:
            raise ValueError("grid must be square")
        n = samples.shape[0]
        return cls(dim=dim, declared_singsupp=singsupp, declared_exponents=exponents,
                   label=label, samples=samples,
                   domain=Region.box([DOMAIN_LOWER] * dim, [DOMAIN_UPPER] * dim),
                   spacing=(DOMAIN_UPPER - DOMAIN_LOWER) / n)

    def coordinates(self):
        n = self.samples.shape[0]
        axis = DOMAIN_LOWER + self.spacing * np.arange(n)
        if self.dim == 1:
            return axis
        g = np.meshgrid(axis, axis, indexing="ij")
        return np.stack(g, axis=-1)

    def pair(self, test):
        vals = test(self.coordinates())
        return float(np.sum(self.samples * vals) * self.spacing ** self.dim)


@dataclass(frozen=True, eq=False)
class Sum(DistributionExpr):
    terms: tuple = ()

    def __post_init__(self):
        pts, every = [], False
        for _, t in self.terms:
            if t.singular_everywhere:
                every = True
            else:
                pts.extend(t.singular_points())
        object.__setattr__(self, "declared_singsupp", EVERYWHERE if every else _singsupp(pts, self.dim))
        if not self.label:
            object.__setattr__(self, "label", "+".join(t.label for _, t in self.terms))

    def pair(self, test):
        return sum(w * t.pair(test) for w, t in self.terms)


@dataclass(frozen=True, eq=False)
class SmoothProduct(DistributionExpr):
    """``factor * inner`` paired as ``inner(factor * phi)``."""

    factor: SmoothFunction = None
    inner: DistributionExpr = None

    def __post_init__(self):
        if self.inner.singular_everywhere or self.factor.singular_everywhere:
            object.__setattr__(self, "declared_singsupp", EVERYWHERE)
        elif self.declared_singsupp == ():
            pts = self.inner.singular_points() + self.factor.singular_points()
            object.__setattr__(self, "declared_singsupp", _singsupp(pts, self.dim))
        if not self.label:
            object.__setattr__(self, "label", f"({self.factor.label})*({self.inner.label})")

    def pair(self, test):
        return self.inner.pair(TestProduct(self.factor, test))


# --------------------------------------------------------------------------
# smooth function constructors


def _fmt(c):
    return ",".join(f"{v:g}" for v in np.atleast_1d(c))


def _symbols(dim):
    return sp.symbols("y0 y1", real=True)[:dim]


def function_from_sympy(expr, dim=1, singular_points=(), label=None, max_derivative=None,
                        cusp=None, exponents=None, zero_at_singular=True):
    """Build a :class:`SmoothFunction` from a sympy expression in ``y0[, y1]``.

    Derivatives are obtained symbolically and compiled lazily.  At declared
    singular points, derivative values that evaluate to nan are replaced by
    0 (the one-sided limit for cusps |y|^a with order < a).
    """
    syms = _symbols(dim)
    # match user symbols by name; y0 without assumptions is a different sympy symbol
    by_name = {str(s): s for s in syms}
    expr = sp.sympify(expr)
    expr = expr.xreplace({s: by_name[str(s)] for s in expr.free_symbols if str(s) in by_name})
    unknown = {str(s) for s in expr.free_symbols} - set(by_name)
    if unknown:
        raise ValueError(f"expression uses {sorted(unknown)}; coordinates are {sorted(by_name)}")
    cache = {}

    def compiled(k):
        if k not in cache:
            e = expr
            for s, o in zip(syms, k):
                if o:
                    e = sp.diff(e, s, o)
            # derivatives of sign() at a declared singular point are not pointwise values
            e = e.replace(sp.DiracDelta, lambda *a: sp.S.Zero)
            cache[k] = (sp.lambdify(syms, e, "numpy"), sp.lambdify(syms, e, "math"))
        return cache[k]

    def evaluate(k, y):
        pts, shape = as_points(y, dim)
        if pts.shape[0] == 1:
            # scalar fast path for quadrature callbacks; any math error takes the array path
            try:
                return np.full(shape, float(compiled(k)[1](*pts[0])))
            except (ArithmeticError, ValueError, TypeError):
                pass
        with np.errstate(all="ignore"):
            vals = compiled(k)[0](*[pts[:, i] for i in range(dim)])
        vals = np.array(np.broadcast_to(np.asarray(vals, dtype=float), (pts.shape[0],)))
        if zero_at_singular:
            vals = np.where(np.isnan(vals), 0.0, vals)
        return vals.reshape(shape)

    zero = (0,) * dim
    return SmoothFunction(
        dim=dim, declared_singsupp=_singsupp(singular_points, dim),
        declared_exponents=exponents, label=label or str(expr),
        func=lambda y: evaluate(zero, y), derivative_fn=evaluate,
        max_derivative=max_derivative, cusp=cusp)


def constant(value=1.0, dim=1):
    return function_from_sympy(sp.Float(value) + 0 * _symbols(dim)[0], dim,
                               label=f"const:{value:g}" if value != 1.0 else "constant-1",
                               exponents={"holder": math.inf, "beta_star": 0.0})


def cusp(center=0.0, exponent=0.6, dim=1, scale=1.0, offset=0.0):
    """``offset + scale * |y - center|**exponent`` with a declared singular point."""
    c = as_point(center, dim)
    syms = _symbols(dim)
    r2 = sum((s - float(ci)) ** 2 for s, ci in zip(syms, c))
    expr = offset + scale * r2 ** (sp.nsimplify(exponent) / 2)
    is_even_integer = float(exponent).is_integer() and int(exponent) % 2 == 0
    sing = [] if is_even_integer else [c]
    max_d = None if is_even_integer else int(math.ceil(exponent)) - 1
    return function_from_sympy(
        expr, dim, sing, label=f"cusp@{_fmt(c)}:{exponent:g}", max_derivative=max_d,
        cusp=(c, float(exponent), float(scale)) if offset == 0.0 else None,
        exponents={"holder": float(exponent)})


def smooth_bump_function(center=0.0, radius=1.0, dim=1, height=1.0):
    """Smooth compactly supported function kernel (smooth everywhere)."""
    c = as_point(center, dim)
    syms = _symbols(dim)
    r2 = sum((s - float(ci)) ** 2 for s, ci in zip(syms, c)) / radius ** 2
    expr = height * sp.Piecewise((sp.exp(1 - 1 / (1 - r2)), r2 < 1), (0, True))
    return function_from_sympy(expr, dim, (), label=f"bump@{_fmt(c)}:{radius:g}",
                               exponents={"holder": math.inf, "beta_star": 0.0})


def polynomial(coefficients, center=0.0, label=None):
    """1D polynomial ``sum a_k (y - center)^k``."""
    y = _symbols(1)[0]
    c = float(np.atleast_1d(center)[0])
    expr = sum(float(a) * (y - c) ** k for k, a in enumerate(coefficients))
    return function_from_sympy(sp.sympify(expr) + 0 * y, 1, (), label=label or f"poly{list(coefficients)}",
                               exponents={"holder": math.inf})


def white_noise(n=4096, dim=1, seed=0):
    """Discretized Gaussian white noise: iid N(0, 1/h^d) samples."""
    rng = np.random.default_rng(seed)
    h = (DOMAIN_UPPER - DOMAIN_LOWER) / n
    samples = rng.standard_normal((n,) * dim) / math.sqrt(h ** dim)
    return GridField.make(samples, EVERYWHERE, label=f"noise:{seed}",
                          exponents={"holder": -dim / 2})


# --------------------------------------------------------------------------
# operations


def _check_support(u, test):
    if test.dim != u.dim:
        raise DomainMismatch(f"test function dimension {test.dim} != kernel dimension {u.dim}")
    lo, hi = test.center - test.radius, test.center + test.radius
    if np.any(lo < DOMAIN_LOWER - 1e-9) or np.any(hi > DOMAIN_UPPER + 1e-9):
        raise DomainMismatch(
            f"test support [{lo.tolist()}, {hi.tolist()}] leaves the domain [-1, 1]^{u.dim}")


def pair(u: DistributionExpr, test) -> float:
    """Evaluate ``u(test)``."""
    _check_support(u, test)
    return float(u.pair(test))


def homogeneous_form(u):
    """``(center, degree, scale, unit)`` when ``u = scale * unit(. - center)`` and
    ``unit`` is homogeneous of the given degree; otherwise None."""
    if isinstance(u, PowerLaw):
        return np.array(u.center), u.exponent, 1.0, ("powerlaw", u.exponent, u.dim)
    if isinstance(u, LogDerivative):
        return np.array(u.center), -1.0, 1.0, ("logderiv", -1.0, 1)
    if isinstance(u, SmoothFunction) and u.cusp is not None:
        c, b, s = u.cusp
        return np.array(c), b, s, ("powerlaw", b, u.dim)
    if (isinstance(u, SmoothProduct) and isinstance(u.inner, PowerLaw)
            and getattr(u.factor, "cusp", None) is not None
            and np.allclose(u.factor.cusp[0], u.inner.center)):
        c, b, s = u.factor.cusp
        a = u.inner.exponent + b
        return np.array(c), a, s, ("powerlaw", a, u.dim)
    return None


def _unit_kernel(unit):
    kind, degree, dim = unit
    if kind == "logderiv":
        return LogDerivative.make(0.0)
    return PowerLaw.make([0.0] * dim, degree, dim)


@functools.lru_cache(maxsize=200_000)
def _unit_pairing(unit, phi, z):
    # the cache key holds phi, so its identity stays unique while cached
    test = TestFunction(phi.profile, radius=phi.radius, center=np.array(z) + phi.center,
                        amplitude=phi.amplitude, r_max=phi.r_max)
    return float(_unit_kernel(unit).pair(test))


def pointwise(u):
    """Callable ``y -> u(y)`` (points of shape (n, d)) for function-like kernels."""
    if isinstance(u, (PowerLaw, SmoothFunction)):
        return u.__call__
    if isinstance(u, LogDerivative):
        c = u.center[0]
        return lambda y: 1.0 / (np.asarray(y, dtype=float).reshape(-1) - c)
    if isinstance(u, Sum):
        parts = [(w, pointwise(t)) for w, t in u.terms]
        if any(f is None for _, f in parts):
            return None
        return lambda y: sum(w * f(y) for w, f in parts)
    if isinstance(u, SmoothProduct):
        inner = pointwise(u.inner)
        if inner is None:
            return None
        return lambda y: u.factor.func(y) * inner(y)
    return None


def pair_scaled(u: DistributionExpr, phi, x, lam: float) -> float:
    """Evaluate ``u(phi^lam_x)`` with ``phi^lam_x(y) = lam^-d phi((y - x)/lam)``."""
    x = as_point(x, u.dim)
    if isinstance(u, Sum):
        return sum(w * pair_scaled(t, phi, x, lam) for w, t in u.terms)
    hom = homogeneous_form(u)
    if hom is not None and lam <= 1.0:
        c, degree, scale, unit = hom
        _check_support(u, scale_translate(phi, lam, x))
        z = tuple(np.round((x - c) / lam, 12).tolist())
        return scale * lam ** degree * _unit_pairing(unit, phi, z)
    if isinstance(u, DiracDelta):
        # closed form avoids building the rescaled object
        k = u.derivative
        t = (np.array(u.center) - x) / lam
        val = phi.deriv(k, t[None, :] if u.dim > 1 else t)
        return float((-1) ** u.order * lam ** (-u.dim - u.order) * np.asarray(val).ravel()[0])
    return pair(u, scale_translate(phi, lam, x))


def _delta_orders(u):
    if isinstance(u, DiracDelta):
        return u.order
    if isinstance(u, Sum):
        return max((_delta_orders(t) for _, t in u.terms), default=0)
    if isinstance(u, SmoothProduct):
        return _delta_orders(u.inner)
    return 0


def multiply_by_smooth(u: DistributionExpr, f: SmoothFunction) -> SmoothProduct:
    m = _delta_orders(u)
    if m and f.max_derivative is not None and f.max_derivative < m:
        raise InsufficientDerivatives(
            f"{u.label} needs {m} derivatives of the factor, {f.label} has {f.max_derivative}")
    return SmoothProduct(dim=u.dim, factor=f, inner=u)
