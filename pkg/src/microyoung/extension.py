"""Scaling degrees and extensions of distributions across a point."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dyadic import _smooth_step
from .errors import (BoundaryWarning, InsufficientResolution, MultiplePoints, NoExtension,
                     NonIntegrableSingularity, NotAdmissible)
from .kernels import (DOMAIN_LOWER, DOMAIN_UPPER, DistributionExpr, PowerLaw, as_point,
                      integrate_1d, integrate_polar, pair_scaled, pointwise, _epsabs)
from .product import (ADMISSIBLE, NOT_ADMISSIBLE, PointwiseProduct, check_young_microlocal,
                      young_product)
from .scans import LineFit
from .testfn import dictionary, multi_indices

SCALES = np.arange(2, 11)
BOUNDARY_BAND = 0.1
PLATEAU_RADIUS = 0.25
# pairings below this fraction of the largest one are treated as zero
ZERO_FLOOR = 1e-14


@dataclass
class ScalingDegreeEstimate:
    x: tuple
    value: float
    stderr: float
    samples: list = field(default_factory=list)  # (log λ, log max |t(φ^λ_x)|)
    dictionary: str = "offcenter"

    def to_dict(self):
        v = self.value
        return {"x": list(self.x), "value": v if math.isfinite(v) else ("inf" if v > 0 else "-inf"),
                "stderr": self.stderr, "dictionary": self.dictionary,
                "samples": [list(s) for s in self.samples]}

    def __float__(self):
        return float(self.value)


def _needs_puncture(t, x0):
    probe = dictionary("plain", t.dim)[0]
    try:
        pair_scaled(t, probe, x0, 0.25)
    except NonIntegrableSingularity:
        return True
    return False


def scaling_degree(t: DistributionExpr, x0=0.0, scales=SCALES) -> ScalingDegreeEstimate:
    """sd = minus the slope of log max_φ |t(φ^λ_{x0})| against log λ.

    Kernels that cannot be paired with test functions covering ``x0`` are
    probed with bumps whose supports avoid it.
    """
    c = as_point(x0, t.dim)
    kind = "punctured" if _needs_puncture(t, c) else "offcenter"
    tests = dictionary(kind, t.dim)
    ns = np.asarray(scales)
    vals = np.array([max(abs(pair_scaled(t, phi, c, 2.0 ** -int(n))) for phi in tests)
                     for n in ns])
    top = float(np.max(vals)) if vals.size else 0.0
    keep = vals > ZERO_FLOOR * max(top, 1.0)
    if not np.any(keep):
        return ScalingDegreeEstimate(tuple(c.tolist()), -math.inf, 0.0, [], kind)
    if np.count_nonzero(keep) < 3:
        raise InsufficientResolution("fewer than 3 non-zero scaled pairings")
    log_lam = -ns[keep] * math.log(2.0)
    log_v = np.log(vals[keep])
    fit = LineFit.of(log_lam, log_v)
    samples = list(zip(log_lam.tolist(), log_v.tolist()))
    # unbounded growth of the local slope signals an infinite degree
    if len(log_v) >= 4:
        local = -np.diff(log_v) / np.diff(log_lam)
        if np.all(np.diff(local) > 1.0) and local[-1] > 10.0:
            return ScalingDegreeEstimate(tuple(c.tolist()), math.inf, fit.stderr, samples, kind)
    return ScalingDegreeEstimate(tuple(c.tolist()), -fit.slope, fit.stderr, samples, kind)


# --------------------------------------------------------------------------
# W_ρ and extension families


def _plateau(c, radius):
    """1 on |y - c| <= radius, 0 beyond 2 radius."""
    dim = len(c)

    def chi(y):
        pts = np.asarray(y, dtype=float).reshape(-1, dim)
        r = np.linalg.norm(pts - c, axis=1)
        return _smooth_step(2.0 - r / radius)
    return chi


def extension_degree(sd, dim):
    """Largest |α| carrying a free coefficient; negative means the extension is unique.

    Within the boundary band of an integer the larger family is kept.
    """
    rho = sd - dim
    deg = int(math.floor(rho + BOUNDARY_BAND))
    if 0 <= deg and rho < deg:
        warnings.warn(f"scaling degree {sd:.3f} is within {BOUNDARY_BAND} of an integer; "
                      f"keeping counterterms up to order {deg}", BoundaryWarning, stacklevel=3)
    return rho, deg


class JetFunction:
    """ψ_α(y) = (y - x0)^α/α! · χ(y), usable wherever a test function is expected.

    Derivatives are exact on the plateau |y - x0| <= radius, where χ ≡ 1.
    """

    def __init__(self, x0, alpha, radius):
        self.x0 = np.asarray(x0, dtype=float)
        self.alpha = tuple(alpha)
        self.dim = len(self.alpha)
        self.center = self.x0
        self.radius = 2.0 * radius
        self.plateau = radius
        self._chi = _plateau(self.x0, radius)
        self._fact = float(np.prod([math.factorial(a) for a in self.alpha]))

    def _pts(self, y):
        return np.asarray(y, dtype=float).reshape(-1, self.dim)

    def __call__(self, y):
        pts = self._pts(y)
        mono = np.prod((pts - self.x0) ** np.array(self.alpha), axis=1) / self._fact
        out = mono * self._chi(pts)
        return out if self.dim > 1 or np.ndim(y) > 0 else out[0]

    def deriv(self, k, y):
        k = tuple(np.atleast_1d(k).tolist())
        if sum(k) == 0:
            return self(y)
        pts = self._pts(y)
        if np.any(np.linalg.norm(pts - self.x0, axis=1) > self.plateau + 1e-12):
            raise ValueError("jet-function derivatives are only evaluated on the plateau")
        out = np.ones(len(pts))
        for i, (a, b) in enumerate(zip(self.alpha, k)):
            if b > a:
                return np.zeros(len(pts))
            out *= (pts[:, i] - self.x0[i]) ** (a - b) / math.factorial(a - b)
        return out


@dataclass
class ExtensionFamily:
    """Extensions t̃ = t∘W_ρ + Σ_{|α|≤ρ} a_α ∂^α δ_{x0} of t from the punctured domain.

    ``jet_functions`` ψ_α = (y - x0)^α/α! · χ with χ ≡ 1 near x0, so the
    jet conditions ∂^β ψ_α(x0) = δ_αβ hold exactly.
    """

    t: DistributionExpr
    x0: tuple
    sd: ScalingDegreeEstimate
    rho: float
    degree: int
    coefficients: dict
    plateau_radius: float

    @property
    def unique(self):
        return self.degree < 0

    @property
    def dim(self):
        return self.t.dim

    @property
    def indices(self):
        return multi_indices(self.dim, self.degree) if self.degree >= 0 else []

    def jet_function(self, alpha):
        return JetFunction(np.array(self.x0), tuple(alpha), self.plateau_radius)

    def jet_of_subtracted(self, phi, beta):
        """∂^β(W_ρ φ)(x0), using ∂^β ψ_α(x0) = δ_αβ."""
        c = np.array(self.x0).reshape(1, -1)
        at = c[:, 0] if self.dim == 1 else c
        d = float(np.asarray(phi.deriv(beta, at)).ravel()[0])
        sub = sum(float(np.asarray(phi.deriv(a, at)).ravel()[0]) * (1.0 if tuple(a) == tuple(beta) else 0.0)
                  for a in self.indices)
        return d - sub

    def subtracted(self, phi):
        """W_ρ φ as a pointwise callable on (n, d) points."""
        c = np.array(self.x0).reshape(1, -1)
        at = c[:, 0] if self.dim == 1 else c
        jets = [(float(np.asarray(phi.deriv(a, at)).ravel()[0]), self.jet_function(a))
                for a in self.indices]
        fmt = (lambda p: p[:, 0]) if self.dim == 1 else (lambda p: p)

        def w(y):
            pts = np.asarray(y, dtype=float).reshape(-1, self.dim)
            out = np.asarray(phi(fmt(pts)), dtype=float).reshape(-1)
            for v, psi in jets:
                out = out - v * psi(pts)
            return out
        return w

    def base_pairing(self, phi):
        """t(W_ρ φ) by quadrature; the subtraction makes the integrand integrable."""
        f = pointwise(self.t)
        c = np.array(self.x0)
        w = self.subtracted(phi)
        lo = np.minimum(phi.center - phi.radius, c - 2 * self.plateau_radius)
        hi = np.maximum(phi.center + phi.radius, c + 2 * self.plateau_radius)
        if self.degree < 0:
            lo, hi = phi.center - phi.radius, phi.center + phi.radius
        lo, hi = np.maximum(lo, DOMAIN_LOWER), np.minimum(hi, DOMAIN_UPPER)
        eps = _epsabs(phi)
        if self.dim == 1:
            g = lambda y: f(np.array([y]))[0] * w(np.array([y]))[0]
            cuts = sorted({lo[0], hi[0]} | ({c[0]} if lo[0] < c[0] < hi[0] else set()))
            return float(sum(integrate_1d(g, a, b, epsabs=eps) for a, b in zip(cuts[:-1], cuts[1:])))
        centre = 0.5 * (lo + hi)
        radius = float(np.linalg.norm(hi - lo) / 2)
        return integrate_polar(lambda p: f(p) * w(p), c, centre, radius, epsabs=eps)

    def counterterm(self, phi, coefficients=None):
        """Σ a_α (−1)^{|α|} ∂^α φ(x0)."""
        coeffs = self.coefficients if coefficients is None else coefficients
        c = np.array(self.x0).reshape(1, -1)
        at = c[:, 0] if self.dim == 1 else c
        total = 0.0
        for a in self.indices:
            v = coeffs.get(tuple(a), 0.0)
            if v:
                total += v * (-1) ** sum(a) * float(np.asarray(phi.deriv(a, at)).ravel()[0])
        return total

    def pair(self, phi, coefficients=None):
        return self.base_pairing(phi) + self.counterterm(phi, coefficients)

    def member(self, coefficients=None):
        coeffs = dict(self.coefficients if coefficients is None else coefficients)
        return ExtendedDistribution(dim=self.dim, declared_singsupp=(self.x0,),
                                    label=f"ext({self.t.label})", family=self, coeffs=coeffs)

    def to_dict(self):
        return {"kernel": self.t.label, "x0": list(self.x0), "scaling_degree": self.sd.to_dict(),
                "rho": self.rho, "degree": self.degree, "unique": self.unique,
                "plateau_radius": self.plateau_radius,
                "coefficients": {",".join(map(str, a)): self.coefficients.get(tuple(a), 0.0)
                                 for a in self.indices}}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


@dataclass(frozen=True, eq=False)
class ExtendedDistribution(DistributionExpr):
    family: ExtensionFamily = None
    coeffs: dict = None

    def pair(self, test):
        return self.family.pair(test, self.coeffs)


def _as_index(key, dim):
    if isinstance(key, str):
        key = tuple(int(v) for v in key.split(",")) if key else (0,) * dim
    if isinstance(key, int):
        key = (key,) + (0,) * (dim - 1)
    return tuple(key)


def extend(t: DistributionExpr, x0=0.0, coefficients: Optional[dict] = None) -> ExtensionFamily:
    """Family of extensions of t across x0 preserving its scaling degree."""
    if pointwise(t) is None:
        raise NoExtension(f"{t.label} has no pointwise form on the punctured domain")
    c = as_point(x0, t.dim)
    sd = scaling_degree(t, c)
    if sd.value == math.inf:
        raise NoExtension(f"{t.label} has infinite scaling degree at {c.tolist()}")
    rho, deg = extension_degree(max(sd.value, 0.0), t.dim)
    coeffs = {_as_index(k, t.dim): float(v) for k, v in (coefficients or {}).items()}
    room = float(min(np.min(c - DOMAIN_LOWER), np.min(DOMAIN_UPPER - c)))
    radius = min(PLATEAU_RADIUS, room / 2.0)
    return ExtensionFamily(t, tuple(c.tolist()), sd, rho, deg, coeffs, radius)


# --------------------------------------------------------------------------
# multiply, then extend


@dataclass
class ExtendedProduct:
    family: Optional[ExtensionFamily]
    exponent: float
    case: str  # "smooth-times-singular", "both-negative" or "no-extension-needed"
    product: Optional[DistributionExpr] = None

    @property
    def unique(self):
        return self.family is None or self.family.unique

    def to_dict(self):
        out = {"case": self.case, "exponent": self.exponent, "unique": self.unique}
        if self.family is not None:
            out["family"] = self.family.to_dict()
        return out


def punctured_product(f, g):
    """f·g away from the common singular point (pointwise)."""
    if isinstance(f, PowerLaw) and isinstance(g, PowerLaw) and np.allclose(f.center, g.center):
        return PowerLaw.make(f.center if f.dim > 1 else f.center[0], f.exponent + g.exponent, f.dim)
    if pointwise(f) is None or pointwise(g) is None:
        raise NoExtension(f"{f.label} * {g.label} has no pointwise form off the singular point")
    return PointwiseProduct(dim=f.dim, first=f, second=g)


def multiply_and_extend(f, g, coefficients: Optional[dict] = None) -> ExtendedProduct:
    pf = {tuple(np.round(p, 12)) for p in f.singular_points()}
    common = [p for p in {tuple(np.round(p, 12)) for p in g.singular_points()} if p in pf]
    if len(common) > 1:
        raise MultiplePoints(f"{len(common)} common singular points; localize first")
    adm = check_young_microlocal(f, g)
    if adm.decision == NOT_ADMISSIBLE and "everywhere" in adm.reason:
        raise NotAdmissible(adm.reason, adm)
    if adm.decision in ADMISSIBLE:
        return ExtendedProduct(None, adm.exponent, "no-extension-needed", young_product(f, g, adm))
    a, b = adm.alpha, adm.beta
    prod = punctured_product(f, g)
    fam = extend(prod, np.array(common[0]), coefficients)
    if a > 0:
        return ExtendedProduct(fam, b, "smooth-times-singular", prod)
    return ExtendedProduct(fam, a + b, "both-negative", prod)
