"""Product germs F_x = P_x·g, their coherence, and the reconstruction bound."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InsufficientDerivatives, NotAdmissible
from .kernels import (DistributionExpr, Region, SmoothFunction, SmoothProduct, Sum, as_point,
                      default_region, pair_scaled)
from .product import check_young_microlocal, young_product
from .regularity import _function_jet, estimate_holder_exponent
from .scans import LineFit, floor_below
from .testfn import dictionary, multi_indices

N_BASE = 17
SCALES = np.arange(2, 11)
OFFSETS = np.arange(1, 9)  # |x - y| = 2^-m
SEED = 0
TOLERANCE = 0.1
MAX_SMOOTH_ORDER = 4
ZERO_FLOOR = 1e-13
# fitted cells need |x - y| >= SEPARATION·λ so the two factors separate
SEPARATION = 4.0


def _num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def taylor_polynomial(f, x, order: int) -> SmoothFunction:
    """Order-``order`` Taylor polynomial of f at x, with exact derivatives."""
    dim = f.dim
    c = as_point(x, dim)
    jet = _function_jet(f)
    if jet is None:
        raise InsufficientDerivatives(f"{f.label} has no derivative evaluator")
    limit = getattr(f, "max_derivative", None)
    if limit is not None and order > limit:
        raise InsufficientDerivatives(f"{f.label} has only {limit} derivatives; "
                                      f"order {order} requested")
    at = c if dim == 1 else c.reshape(1, dim)
    coeffs = []
    for k in multi_indices(dim, order):
        v = float(np.asarray(jet(k, at)).ravel()[0])
        if v != 0.0:
            coeffs.append((tuple(k), v / float(np.prod([math.factorial(i) for i in k]))))

    def derivative(j, y):
        j = tuple(np.atleast_1d(j).tolist()) if dim > 1 else (int(np.atleast_1d(j)[0]),)
        pts = np.asarray(y, dtype=float).reshape(-1, dim)
        out = np.zeros(len(pts))
        for k, a in coeffs:
            if any(jj > kk for jj, kk in zip(j, k)):
                continue
            term = np.full(len(pts), a)
            for i, (kk, jj) in enumerate(zip(k, j)):
                term = term * (pts[:, i] - c[i]) ** (kk - jj) * (
                    math.factorial(kk) / math.factorial(kk - jj))
            out += term
        return out.reshape(np.shape(y)[:-1] if dim > 1 else np.shape(y))

    return SmoothFunction(dim=dim, declared_singsupp=(), label=f"taylor{order}({f.label})@{c.tolist()}",
                          func=lambda y: derivative((0,) * dim, y), derivative_fn=derivative)


@dataclass
class Germ:
    """Family x ↦ F_x of local models.

    ``focus`` lists the points near which the germ differs across x (the
    singular points of g for product germs); sampling concentrates there.
    """

    generator: Callable
    dim: int
    focus: tuple = ()
    alpha: Optional[float] = None
    beta: Optional[float] = None
    order: Optional[int] = None
    f: Optional[DistributionExpr] = None
    g: Optional[DistributionExpr] = None
    label: str = "germ"

    def __call__(self, x):
        return self.generator(as_point(x, self.dim))

    def difference(self, x, y):
        """F_x − F_y as a single expression."""
        if self.f is not None:
            px = taylor_polynomial(self.f, x, self.order)
            py = taylor_polynomial(self.f, y, self.order)
            diff = SmoothFunction(dim=self.dim, declared_singsupp=(), label="P_x-P_y",
                                  func=lambda z: px(z) - py(z),
                                  derivative_fn=lambda k, z: px.deriv(k, z) - py.deriv(k, z))
            return SmoothProduct(dim=self.dim, factor=diff, inner=self.g)
        return Sum(dim=self.dim, terms=((1.0, self(x)), (-1.0, self(y))))

    def to_dict(self):
        return {"label": self.label, "alpha": _num(self.alpha), "beta": _num(self.beta),
                "taylor_order": self.order, "focus": [list(p) for p in self.focus]}


def product_germ(f, g, alpha: Optional[float] = None, beta: Optional[float] = None,
                 order: Optional[int] = None) -> Germ:
    """F_x = P_x·g with P_x the Taylor polynomial of f at x of order below α."""
    a = estimate_holder_exponent(f).value if alpha is None else float(alpha)
    b = estimate_holder_exponent(g).value if beta is None else float(beta)
    if not a > 0:
        raise InsufficientDerivatives(f"{f.label} has exponent {a:g}; a positive one is needed")
    if order is None:
        order = MAX_SMOOTH_ORDER if math.isinf(a) else max(floor_below(a), 0)
    taylor_polynomial(f, as_point(0.0, f.dim), order)  # fail early on missing derivatives
    dim = f.dim

    def gen(x):
        return SmoothProduct(dim=dim, factor=taylor_polynomial(f, x, order), inner=g,
                             label=f"P_x({f.label})*{g.label}")

    focus = tuple(tuple(p.tolist()) for p in g.singular_points())
    return Germ(gen, dim, focus, a, b, order, f, g, label=f"germ({f.label}, {g.label})")


def constant_germ(g) -> Germ:
    return Germ(lambda x: g, g.dim, tuple(tuple(p.tolist()) for p in g.singular_points()),
                label=f"const({g.label})")


# --------------------------------------------------------------------------
# sampling


def _base_points(F, K, lam, rng):
    """N_BASE points: λ-adapted around each focus point in K, else uniform in K."""
    lo, hi = K.bounding_box()
    focus = [np.asarray(p) for p in F.focus if K.contains(np.asarray(p)[None, :] if F.dim > 1 else np.asarray(p))]
    if not focus:
        return lo + (hi - lo) * rng.random((N_BASE, F.dim))
    t = np.linspace(-0.8, 0.8, N_BASE)
    pts = []
    for p in focus:
        if F.dim == 1:
            pts.append(p[None, :] + lam * t[:, None])
        else:
            ang = 2 * np.pi * rng.random(N_BASE)
            pts.append(p[None, :] + lam * np.abs(t)[:, None] * np.column_stack([np.cos(ang), np.sin(ang)]))
    return np.clip(np.vstack(pts), lo, hi)


def _unit(dim, rng):
    if dim == 1:
        return np.array([1.0 if rng.random() < 0.5 else -1.0])
    a = 2 * np.pi * rng.random()
    return np.array([math.cos(a), math.sin(a)])


def _test_order(alpha_k):
    return max(int(math.ceil(-alpha_k)) + 1, 1) if math.isfinite(alpha_k) else 2


@dataclass
class CoherenceReport:
    gamma: float
    alpha_k: float
    samples: list = field(default_factory=list)  # (x, y, λ, |(F_x − F_y)(φ^λ_y)|)
    lambda_slope: float = math.inf
    offset_slope: float = math.inf
    combined_slope: float = math.inf
    stderr: float = 0.0
    passed: bool = True

    def to_dict(self):
        return {"gamma": self.gamma, "alpha_K": self.alpha_k,
                "lambda_slope": _num(self.lambda_slope), "offset_slope": _num(self.offset_slope),
                "combined_slope": _num(self.combined_slope), "stderr": self.stderr,
                "pass": self.passed, "n_samples": len(self.samples)}


def check_coherence(F: Germ, gamma: Optional[float] = None, alpha_k: Optional[float] = None,
                    K: Optional[Region] = None, seed: int = SEED) -> CoherenceReport:
    """Fit |(F_x − F_y)(φ^λ_y)| ≲ λ^{α_K}(|x−y|+λ)^{γ−α_K}.

    The per-cell maximum over base points and test functions is regressed on
    log λ and log(|x−y|+λ) over the cells with |x−y| ≥ 4λ, where the two
    factors separate.  Defaults: α_K = β, γ = α + β for product germs.
    """
    K = K or default_region(F.dim)
    if alpha_k is None:
        alpha_k = F.beta
    if gamma is None:
        gamma = F.alpha + F.beta
    rng = np.random.default_rng(seed)
    tests = dictionary("plain", F.dim, r=_test_order(alpha_k))
    samples, rows = [], []
    for n in SCALES:
        lam = 2.0 ** -int(n)
        ys = _base_points(F, K, lam, rng)
        for m in OFFSETS:
            h = 2.0 ** -int(m)
            best = 0.0
            for y in ys:
                x = y + h * _unit(F.dim, rng)
                diff = F.difference(x, y)
                yy = y if F.dim > 1 else y[0]
                v = max(abs(pair_scaled(diff, phi, yy, lam)) for phi in tests)
                samples.append((x.tolist(), y.tolist(), lam, v))
                best = max(best, v)
            rows.append((lam, h, best))
    rows = np.array(rows)
    top = float(np.max(rows[:, 2]))
    use = (rows[:, 1] >= SEPARATION * rows[:, 0]) & (rows[:, 2] > ZERO_FLOOR * max(top, 1.0))
    report = CoherenceReport(float(gamma), float(alpha_k), samples)
    if np.count_nonzero(use) < 4:
        return report  # differences vanish: coherent at every order
    lam, h, v = rows[use].T
    X = np.column_stack([np.ones(len(lam)), np.log(lam), np.log(h + lam)])
    coef, res, *_ = np.linalg.lstsq(X, np.log(v), rcond=None)
    dof = max(len(v) - 3, 1)
    resid = np.log(v) - X @ coef
    cov = np.linalg.pinv(X.T @ X) * float(resid @ resid) / dof
    report.lambda_slope = float(coef[1])
    report.offset_slope = float(coef[2])
    report.combined_slope = float(coef[1] + coef[2])
    report.stderr = float(math.sqrt(max(cov[1, 1], 0.0)))
    report.passed = bool(report.lambda_slope >= alpha_k - TOLERANCE
                         and report.combined_slope >= gamma - TOLERANCE)
    return report


def reconstruct_product_germ(F: Germ) -> DistributionExpr:
    """The reconstruction of a product germ is the Young product f·g."""
    if F.f is None:
        raise NotAdmissible("only product germs can be reconstructed")
    adm = check_young_microlocal(F.f, F.g, alpha=F.alpha, beta=F.beta)
    return young_product(F.f, F.g, adm)


@dataclass
class ReconstructionReport:
    gamma: float
    scales: list
    magnitudes: list
    slope: float
    stderr: float
    passed: bool

    def to_dict(self):
        return {"gamma": _num(self.gamma), "scales": self.scales, "magnitudes": self.magnitudes,
                "slope": _num(self.slope), "stderr": self.stderr, "pass": self.passed}


def verify_reconstruction_bound(F: Germ, RF: DistributionExpr, K: Optional[Region] = None,
                                gamma: Optional[float] = None, seed: int = SEED) -> ReconstructionReport:
    """Slope of max_x |(RF − F_x)(φ^λ_x)| against λ; must reach γ − 0.1."""
    K = K or default_region(F.dim)
    gamma = F.alpha + F.beta if gamma is None else gamma
    rng = np.random.default_rng(seed)
    tests = dictionary("plain", F.dim, r=_test_order(F.beta if F.beta is not None else -1.0))
    lams, mags = [], []
    for n in SCALES:
        lam = 2.0 ** -int(n)
        best = 0.0
        for x in _base_points(F, K, lam, rng):
            diff = Sum(dim=F.dim, terms=((1.0, RF), (-1.0, F(x))))
            xx = x if F.dim > 1 else x[0]
            best = max(best, max(abs(pair_scaled(diff, phi, xx, lam)) for phi in tests))
        lams.append(lam)
        mags.append(best)
    mags_a = np.array(mags)
    keep = mags_a > ZERO_FLOOR * max(float(mags_a.max()), 1.0)
    if np.count_nonzero(keep) < 3:
        return ReconstructionReport(gamma, lams, mags, math.inf, 0.0, True)
    fit = LineFit.of(np.log(np.array(lams)[keep]), np.log(mags_a[keep]))
    return ReconstructionReport(gamma, lams, mags, fit.slope, fit.stderr,
                                bool(fit.slope >= gamma - TOLERANCE))


def report_json(obj) -> str:
    return json.dumps(obj.to_dict(), sort_keys=True)
