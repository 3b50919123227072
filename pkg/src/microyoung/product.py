"""Young products: classical and microlocal admissibility, construction, continuity bound."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientResolution, NotAdmissible, RolesUndetermined
from .kernels import (DOMAIN_LOWER, DOMAIN_UPPER, DiracDelta, DistributionExpr, PowerLaw,
                      Region, SmoothFunction, SmoothProduct, Sum, as_point, cusp,
                      default_region, integrate_1d, integrate_polar, pointwise,
                      smooth_bump_function, _epsabs, _scalar)
from .regularity import (_function_jet, estimate_beta_star, estimate_holder_exponent,
                         holder_norm)
from .scans import scaled_pairings

MARGIN = 0.1
LEDGER_RADIUS_CAP = 0.25

ADMISSIBLE_CLASSICAL = "AdmissibleClassical"
ADMISSIBLE_MICROLOCAL = "AdmissibleMicrolocal"
ADMISSIBLE_DISJOINT = "AdmissibleDisjointSupport"
REQUIRES_EXTENSION = "RequiresExtension"
NOT_ADMISSIBLE = "NotAdmissible"
INCONCLUSIVE = "Inconclusive"
ADMISSIBLE = (ADMISSIBLE_CLASSICAL, ADMISSIBLE_MICROLOCAL, ADMISSIBLE_DISJOINT)
EVERYWHERE_REASON = "singular support everywhere"


def _num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


@dataclass
class LedgerEntry:
    x: tuple
    alpha_local: float
    beta_star_local: float
    margin: float
    radius: float

    def to_dict(self):
        return {"x": list(self.x), "alpha_local": _num(self.alpha_local),
                "beta_star_local": _num(self.beta_star_local), "margin": _num(self.margin),
                "radius": self.radius}


@dataclass
class ProductAdmissibility:
    decision: str
    ledger: list = field(default_factory=list)
    exponent: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    swapped: bool = False
    reason: str = ""

    @property
    def admissible(self):
        return self.decision in ADMISSIBLE

    def to_dict(self):
        return {"decision": self.decision, "ledger": [e.to_dict() for e in self.ledger],
                "exponent": _num(self.exponent) if self.exponent is not None else None,
                "alpha": _num(self.alpha) if self.alpha is not None else None,
                "beta": _num(self.beta) if self.beta is not None else None,
                "swapped": self.swapped, "reason": self.reason}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def check_young_classical(alpha: float, beta: float) -> ProductAdmissibility:
    """Admissible iff α + β > 0; the product then has exponent min(α, β)."""
    if alpha + beta > 0:
        return ProductAdmissibility(ADMISSIBLE_CLASSICAL, exponent=min(alpha, beta),
                                    alpha=alpha, beta=beta)
    return ProductAdmissibility(NOT_ADMISSIBLE, alpha=alpha, beta=beta,
                                reason=f"alpha + beta = {alpha + beta:g} <= 0")


def _points(u):
    return [tuple(np.round(p, 12).tolist()) for p in u.singular_points()]


def _common_points(f, g):
    pf = set(_points(f))
    return sorted(p for p in set(_points(g)) if p in pf)


def ledger_radius(f, g):
    pts = sorted(set(_points(f)) | set(_points(g)))
    dmin = min((float(np.linalg.norm(np.subtract(a, b)))
                for i, a in enumerate(pts) for b in pts[i + 1:]), default=math.inf)
    return min(LEDGER_RADIUS_CAP, dmin / 2.0)


def _local_entry(f, g, x, radius):
    dim = f.dim
    c = as_point(x, dim)
    K = Region.centered(c, radius)
    a = estimate_holder_exponent(f, K).value
    phi_g = smooth_bump_function(center=c if dim > 1 else c[0], radius=radius, dim=dim)
    gl = SmoothProduct(dim=dim, factor=phi_g, inner=g)
    b = estimate_beta_star(gl, K).value
    return LedgerEntry(tuple(c.tolist()), a, b, a + b, radius)


def check_young_microlocal(f, g, alpha: Optional[float] = None, beta: Optional[float] = None,
                           margin: float = MARGIN) -> ProductAdmissibility:
    """Decide admissibility of f·g, assigning the positive-exponent role automatically.

    Margins within ``margin`` of zero give ``Inconclusive``.
    """
    if f.singular_everywhere or g.singular_everywhere:
        return ProductAdmissibility(NOT_ADMISSIBLE, reason=EVERYWHERE_REASON)
    a = estimate_holder_exponent(f).value if alpha is None else alpha
    b = estimate_holder_exponent(g).value if beta is None else beta
    swapped = b > a
    if swapped:
        f, g, a, b = g, f, b, a
    base = dict(alpha=a, beta=b, swapped=swapped)
    common = _common_points(f, g)
    classical = a + b > margin
    if a <= 0 and not classical:
        if not common:
            return ProductAdmissibility(ADMISSIBLE_DISJOINT, exponent=a + b, **base)
        return ProductAdmissibility(REQUIRES_EXTENSION, **base,
                                    reason="negative exponents with a common singular point")
    if not common:
        if classical:
            return ProductAdmissibility(ADMISSIBLE_CLASSICAL, exponent=min(a, b), **base)
        return ProductAdmissibility(ADMISSIBLE_MICROLOCAL, exponent=b, **base)
    if classical and b >= 0:
        # two function factors: nothing for the local ledger to add
        return ProductAdmissibility(ADMISSIBLE_CLASSICAL, exponent=min(a, b), **base)
    radius = ledger_radius(f, g)
    ledger = [_local_entry(f, g, x, radius) for x in common] if a > 0 else []
    margins = [e.margin for e in ledger]
    if ledger and all(m > margin for m in margins):
        return ProductAdmissibility(ADMISSIBLE_MICROLOCAL, ledger, exponent=b, **base)
    if classical:
        # the global condition implies the local one; a failing ledger is estimator noise
        return ProductAdmissibility(ADMISSIBLE_CLASSICAL, ledger, exponent=min(a, b), **base)
    if any(abs(m) <= margin for m in margins):
        return ProductAdmissibility(INCONCLUSIVE, ledger, **base,
                                    reason="a ledger margin lies within the decision band")
    if b > -f.dim:
        return ProductAdmissibility(REQUIRES_EXTENSION, ledger, **base,
                                    reason="alpha + beta* <= 0 at a common singular point")
    return ProductAdmissibility(NOT_ADMISSIBLE, ledger, **base,
                                reason="alpha + beta* <= 0 and beta <= -d")


# --------------------------------------------------------------------------
# construction


@dataclass(frozen=True, eq=False)
class PointwiseProduct(DistributionExpr):
    """Product of two locally integrable functions, paired by quadrature."""

    first: DistributionExpr = None
    second: DistributionExpr = None

    def __post_init__(self):
        if self.declared_singsupp == ():
            pts = self.first.singular_points() + self.second.singular_points()
            object.__setattr__(self, "declared_singsupp",
                               tuple(tuple(p.tolist()) for p in pts))
        if not self.label:
            object.__setattr__(self, "label", f"({self.first.label})*({self.second.label})")

    def __call__(self, y):
        return pointwise(self.first)(y) * pointwise(self.second)(y)

    def pair(self, test):
        sing = [p for p in self.singular_points()
                if np.linalg.norm(p - test.center) < test.radius]
        g = lambda y: self(y) * test(y)
        eps = _epsabs(test)
        if self.dim == 1:
            lo, hi = test.center[0] - test.radius, test.center[0] + test.radius
            # integrable endpoint singularities: split at every singular point
            edges = [lo] + sorted(p[0] for p in sing) + [hi]
            return sum(integrate_1d(_scalar(g, 1), a, b, epsabs=eps)
                       for a, b in zip(edges[:-1], edges[1:]))
        c = sing[0] if sing else test.center
        return integrate_polar(g, c, test.center, test.radius, epsabs=eps)


def _delta_terms(u, weight=1.0):
    if isinstance(u, DiracDelta):
        return [(weight, u)]
    if isinstance(u, Sum):
        out = []
        for w, t in u.terms:
            sub = _delta_terms(t, weight * w)
            if sub is None:
                return None
            out += sub
        return out
    return None


def _as_smooth_factor(f):
    if isinstance(f, SmoothFunction):
        return f
    if isinstance(f, PowerLaw) and f.exponent > 0:
        return cusp(f.center if f.dim > 1 else f.center[0], f.exponent, f.dim)
    jet = _function_jet(f)
    if jet is None:
        return None
    return SmoothFunction(dim=f.dim, declared_singsupp=f.declared_singsupp, label=f.label,
                          func=lambda y: jet((0,) * f.dim, y),
                          derivative_fn=lambda k, y: jet(k, y))


def _delta_product(f, deltas):
    """f · Σ w ∂^k δ_c via the Leibniz rule (coefficients need ∂^j f at c)."""
    jet = _function_jet(_as_smooth_factor(f) or f)
    terms = []
    for w, d in deltas:
        c = np.array(d.center)
        if d.dim > 1 and d.order > 0:
            return None
        if d.dim > 1:
            val = float(np.asarray(jet((0,) * d.dim, c[None, :])).ravel()[0])
            terms.append((w * val, DiracDelta.make(c, (), d.dim)))
            continue
        k = d.derivative[0] if d.derivative else 0
        for j in range(k + 1):
            fj = float(np.asarray(jet((j,), c)).ravel()[0])
            coef = w * (-1) ** j * comb(k, j) * fj
            if coef != 0.0:
                terms.append((coef, DiracDelta.make(c[0], (k - j,) if k - j else (), 1)))
    label = f"({f.label})*({'+'.join(d.label for _, d in deltas)})"
    if not terms:
        terms = [(0.0, DiracDelta.make(deltas[0][1].center, (), f.dim))]
    return Sum(dim=f.dim, terms=tuple(terms), label=label)


def young_product(f, g, admissibility: Optional[ProductAdmissibility] = None) -> DistributionExpr:
    """f·g defined by (f·g)(ψ) = g(fψ), with f the factor of positive exponent."""
    adm = admissibility or check_young_microlocal(f, g)
    if not adm.admissible:
        raise NotAdmissible(adm.reason or adm.decision, adm)
    if adm.swapped:
        f, g = g, f
    deltas = _delta_terms(g)
    if adm.decision == ADMISSIBLE_DISJOINT:
        fd = _delta_terms(f)
        if deltas is not None and fd is not None:
            # disjoint point supports: the product vanishes
            return Sum(dim=f.dim, terms=((0.0, fd[0][1]),), label=f"({f.label})*({g.label})")
        if deltas is not None and _function_jet(f) is not None:
            return _delta_product(f, deltas)
        if fd is not None and _function_jet(g) is not None:
            return _delta_product(g, fd)
        if pointwise(f) is not None and pointwise(g) is not None:
            return PointwiseProduct(dim=f.dim, first=f, second=g)
        raise RolesUndetermined(f"cannot form the product of {f.label} and {g.label}")
    if deltas is not None and _function_jet(f) is not None:
        prod = _delta_product(f, deltas)
        if prod is not None:
            return prod
    factor = _as_smooth_factor(f)
    if factor is not None:
        return SmoothProduct(dim=f.dim, factor=factor, inner=g)
    if pointwise(f) is not None and pointwise(g) is not None:
        return PointwiseProduct(dim=f.dim, first=f, second=g)
    raise RolesUndetermined(f"neither {f.label} nor {g.label} can act as the function factor")


def mollified_product_pairing(f, g, psi, eps: float, n_nodes: int = 400) -> float:
    """∫ f ψ (g ∗ ρ_ε) with an even bump mollifier ρ; tends to (f·g)(ψ) as ε → 0."""
    from .testfn import make_bump
    rho = make_bump(1.0, 0, dim=1)
    rho = type(rho)(rho.profile, radius=1.0, amplitude=rho.amplitude / _mass(rho), r_max=0)
    t, w = np.polynomial.legendre.leggauss(n_nodes)
    c, R = float(psi.center[0]), float(psi.radius)
    # resolve the O(eps) layer around each singular point of g
    cuts = {float(p[0]) for p in f.singular_points()}
    cuts |= {float(p[0]) + s * eps for p in g.singular_points() for s in (-1.0, 0.0, 1.0)}
    edges = sorted({c - R, c + R} | {x for x in cuts if c - R < x < c + R})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        y = 0.5 * (a + b) + 0.5 * (b - a) * t
        gm = scaled_pairings(g, rho, y, eps)
        total += 0.5 * (b - a) * np.sum(w * pointwise(f)(y) * psi(y) * gm)
    return float(total)


def _mass(phi):
    from scipy import integrate
    return integrate.quad(lambda y: float(phi(np.array([y]))[0]), -phi.radius, phi.radius)[0]


# --------------------------------------------------------------------------
# continuity bound


@dataclass
class ContinuityReport:
    ratios: list
    labels: list
    max_ratio: float
    relative_variation: float
    monotone_growth: bool

    @property
    def bounded(self):
        return math.isfinite(self.max_ratio) and not self.monotone_growth

    def to_dict(self):
        return {"ratios": self.ratios, "labels": self.labels, "max_ratio": self.max_ratio,
                "relative_variation": self.relative_variation,
                "monotone_growth": self.monotone_growth, "bounded": self.bounded}


def _enlarged(K, r=1.0):
    lo, hi = K.bounding_box()
    # keep scale-1/4 test supports inside the domain
    lo = np.maximum(lo - r, DOMAIN_LOWER + 0.25)
    hi = np.minimum(hi + r, DOMAIN_UPPER - 0.25)
    return Region.box(lo, hi)


def verify_continuity_bound(f, g, K: Optional[Region] = None,
                            family: Optional[Sequence] = None, alpha: Optional[float] = None,
                            beta: Optional[float] = None) -> ContinuityReport:
    """max over the family of ‖f·g‖_{C^β(K)} / (‖f‖_{C^α(K₁)} ‖g‖_{C^β(K₁)}).

    ``family`` is a sequence of (f_i, g_i) instances; it defaults to the
    single pair (f, g).  Exponents default to estimates on (f, g).
    """
    K = K or default_region(f.dim)
    adm = check_young_microlocal(f, g)
    if adm.decision != ADMISSIBLE_MICROLOCAL and adm.decision != ADMISSIBLE_CLASSICAL:
        raise NotAdmissible(adm.reason or adm.decision, adm)
    if adm.swapped:
        f, g = g, f
        family = [(b, a) for a, b in family] if family else None
    a = adm.alpha if alpha is None else alpha
    b = adm.beta if beta is None else beta
    # a C^α norm needs α strictly below the measured exponent when that is an integer
    a_norm = min(a, math.floor(a + 1e-9)) if a > 0 else a
    K1 = _enlarged(K)
    family = list(family or [(f, g)])
    ratios, labels = [], []
    for fi, gi in family:
        prod = young_product(fi, gi, ProductAdmissibility(adm.decision, exponent=b))
        num = holder_norm(prod, b, K)
        den = holder_norm(fi, a_norm, K1) * holder_norm(gi, b, K1)
        if den == 0:
            raise InsufficientResolution("zero norm in the continuity-bound denominator")
        ratios.append(num / den)
        labels.append(f"{fi.label} | {gi.label}")
    r = np.array(ratios)
    growth = len(r) >= 3 and bool(np.all(np.diff(r) > 0.05 * r[:-1]))
    return ContinuityReport(r.tolist(), labels, float(r.max()),
                            float(r.max() / r.min() - 1.0) if r.min() > 0 else math.inf, growth)
