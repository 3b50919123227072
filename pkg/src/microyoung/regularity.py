"""Estimators for the Hölder exponent, β*, and the local Sobolev exponent."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import spectral
from .errors import InsufficientResolution
from .kernels import (DiracDelta, GridField, PowerLaw, Region, SmoothFunction, Sum, as_point,
                      default_region)
from .scans import FINITE_SLOPE, LineFit, lp_nodes, lp_norm, sup_pairings
from .testfn import dictionary, multi_indices

SCALES = tuple(range(2, 11))  # λ = 2^-n
MIN_SAMPLES = 5
MAX_TAYLOR_ORDER = 4
# Taylor remainders are fitted on the finest scales only (asymptotic regime)
TAYLOR_TAIL = 5
DEFAULT_P = (2.0, 4.0, 8.0, math.inf)
# test functions must span this many grid cells to resolve a sampled field
GRID_CELLS_PER_SCALE = 8


@dataclass
class RegularityReport:
    kind: str
    value: float
    stderr: float
    samples: list
    region: Optional[Region] = None
    diagnostics: dict = field(default_factory=dict)
    p_table: Optional[dict] = None

    @property
    def smooth(self):
        return math.isinf(self.value) and self.value > 0

    def to_dict(self):
        def num(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
            return v

        out = {"kind": self.kind, "value": num(float(self.value)),
               "stderr": num(float(self.stderr)),
               "samples": [[num(float(a)), num(float(b))] for a, b in self.samples],
               "diagnostics": {k: num(v) for k, v in self.diagnostics.items()}}
        if self.region is not None:
            out["region"] = self.region.to_dict()
        if self.p_table is not None:
            out["p_table"] = {k: {kk: num(vv) for kk, vv in v.items()}
                              for k, v in self.p_table.items()}
        return out

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _scales(u, scales):
    ns = np.asarray(scales, dtype=int)
    grid = _grid_spacing(u)
    if grid is not None:
        ns = ns[2.0 ** -ns >= GRID_CELLS_PER_SCALE * grid]
    return ns


def _grid_spacing(u):
    if isinstance(u, GridField):
        return u.spacing
    if isinstance(u, Sum):
        hs = [_grid_spacing(t) for _, t in u.terms]
        hs = [h for h in hs if h is not None]
        return max(hs) if hs else None
    inner = getattr(u, "inner", None)
    return _grid_spacing(inner) if inner is not None else None


def _fit(xs, ys, kind):
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    ok = np.isfinite(ys)
    if ok.sum() < MIN_SAMPLES:
        raise InsufficientResolution(f"{kind}: only {int(ok.sum())} usable scales "
                                     f"(need {MIN_SAMPLES})")
    return LineFit.of(xs[ok], ys[ok]), list(zip(xs[ok].tolist(), ys[ok].tolist()))


def _log(v):
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), -np.inf)


def _scan_sup_pairings(u, K, ns, tests):
    """Per scale: nodes, weights and pointwise sup over ``tests`` of |u(φ^λ_x)|."""
    sing = u.singular_points()
    out = []
    for n in ns:
        lam = 2.0 ** -int(n)
        x, w = lp_nodes(K, lam, sing)
        out.append((x, w, sup_pairings(u, tests, x, lam)))
    return out


# --------------------------------------------------------------------------
# Hölder exponent


def _function_jet(u):
    """Callable (multi-index k, points) -> ∂^k u, or None when u is not function-like."""
    if isinstance(u, SmoothFunction) and u.derivative_fn is not None:
        return u.piecewise_deriv
    if isinstance(u, PowerLaw) and u.dim == 1 and u.exponent > 0:
        c, a = u.center[0], u.exponent

        def jet(k, y):
            order = k[0] if isinstance(k, tuple) else int(k)
            y = np.asarray(y, dtype=float).reshape(-1)
            coef = np.prod([a - i for i in range(order)])
            d = y - c
            with np.errstate(divide="ignore", invalid="ignore"):
                return coef * np.abs(d) ** (a - order) * np.sign(d) ** order
        return jet
    if isinstance(u, Sum):
        parts = [(w, _function_jet(t)) for w, t in u.terms]
        if any(j is None for _, j in parts):
            return None
        return lambda k, y: sum(w * j(k, y) for w, j in parts)
    return None


def _directions(dim):
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    ang = np.arange(8) * np.pi / 4
    return np.column_stack([np.cos(ang), np.sin(ang)])


def taylor_remainders(u, K: Region, order: int, ns=SCALES):
    """sup over x in K, |y - x| = 2^-n of |u(y) - P^order_x(y)|."""
    jet = _function_jet(u)
    dim = u.dim
    x = K.sample(33)
    x = x.reshape(-1, 1) if dim == 1 else x
    sing = [p for p in u.singular_points() if K.contains(p[None, :] if dim > 1 else p)]
    if sing:
        x = np.vstack([x] + [p.reshape(1, dim) for p in sing])
    fmt = (lambda p: p[:, 0]) if dim == 1 else (lambda p: p)
    idx = multi_indices(dim, order)
    with np.errstate(all="ignore"):
        derivs = {k: np.asarray(jet(k, fmt(x)), dtype=float).reshape(-1) for k in idx}
    good = np.all([np.isfinite(v) for v in derivs.values()], axis=0)
    x = x[good]
    derivs = {k: v[good] for k, v in derivs.items()}
    out = []
    for n in ns:
        h = 2.0 ** -int(n)
        best = 0.0
        for e in _directions(dim):
            y = x + h * e
            inside = np.all((y >= -1.0) & (y < 1.0), axis=1)
            step = h * e
            poly = np.zeros(len(x))
            for k, v in derivs.items():
                mono = np.prod([step[i] ** k[i] / math.factorial(k[i]) for i in range(dim)])
                poly += v * mono
            with np.errstate(all="ignore"):
                fy = np.asarray(jet((0,) * dim, fmt(y)), dtype=float).reshape(-1)
            r = np.abs(fy - poly)[inside & np.isfinite(fy)]
            if r.size:
                best = max(best, float(np.max(r)))
        out.append(best)
    return np.array(out)


def _positive_branch(u, K, ns):
    jet = _function_jet(u)
    if jet is None:
        return None
    ns = np.asarray(ns)[-TAYLOR_TAIL:]
    scale = max(1.0, float(np.max(np.abs(jet((0,) * u.dim, K.sample(33))))))
    log_h = -np.asarray(ns, dtype=float) * math.log(2.0)
    slopes = []
    for order in range(MAX_TAYLOR_ORDER + 1):
        rem = taylor_remainders(u, K, order, ns)
        rem = np.where(rem > 1e-13 * scale, rem, 0.0)
        if np.count_nonzero(rem) < MIN_SAMPLES:
            return RegularityReport("holder", math.inf, 0.0, [], K,
                                    {"branch": "positive", "smooth": True, "order": order,
                                     "order_slopes": slopes})
        fit, samples = _fit(log_h, _log(rem), "holder")
        slopes.append(fit.slope)
        if fit.slope < order + 1 - FINITE_SLOPE:
            return RegularityReport("holder", fit.slope, fit.stderr, samples, K,
                                    {"branch": "positive", "order": order,
                                     "residual": fit.residual, "order_slopes": slopes})
    return RegularityReport("holder", math.inf, 0.0, [], K,
                            {"branch": "positive", "smooth": True,
                             "order": MAX_TAYLOR_ORDER, "order_slopes": slopes})


def estimate_holder_exponent(u, K: Optional[Region] = None, scales=SCALES,
                             r: int = 2) -> RegularityReport:
    """Local Hölder exponent on K.

    Negative side: least-squares slope of log sup_{x, φ} |u(φ^λ_x)| against
    log λ.  A slope at or above zero means plain test functions cannot see
    the regularity, and the fit moves to Taylor remainders of increasing
    order (stopping at the first order whose remainder does not improve by
    a full power of h).
    """
    K = K or default_region(u.dim)
    ns = _scales(u, scales)
    scans = _scan_sup_pairings(u, K, ns, dictionary("plain", u.dim, r=r))
    sups = [float(np.max(s)) if s.size else 0.0 for _, _, s in scans]
    log_lam = -ns * math.log(2.0)
    fit, samples = _fit(log_lam, _log(sups), "holder")
    if fit.slope < -FINITE_SLOPE:
        return RegularityReport("holder", fit.slope, fit.stderr, samples, K,
                                {"branch": "negative", "residual": fit.residual})
    pos = _positive_branch(u, K, ns if len(ns) >= MIN_SAMPLES else np.array(SCALES))
    if pos is None:
        return RegularityReport("holder", fit.slope, fit.stderr, samples, K,
                                {"branch": "negative", "residual": fit.residual,
                                 "positive_branch": "unavailable"})
    pos.diagnostics["negative_slope"] = fit.slope
    return pos


# --------------------------------------------------------------------------
# β*


def _p_key(p):
    return "inf" if math.isinf(p) else f"{p:g}"


def estimate_beta_star(g, K: Optional[Region] = None, p_samples=DEFAULT_P, scales=SCALES,
                       r: int = 2) -> RegularityReport:
    """min(0, max_p γ̂(p)), γ̂(p) the slope of log ‖sup_φ |g(φ^λ_x)|‖_{L^p(K)} in log λ."""
    p_samples = tuple(float(p) for p in p_samples)
    if any(not (p >= 2.0) for p in p_samples):
        raise ValueError("p samples must lie in [2, inf]")
    K = K or default_region(g.dim)
    ns = _scales(g, scales)
    scans = _scan_sup_pairings(g, K, ns, dictionary("plain", g.dim, r=r))
    log_lam = -ns * math.log(2.0)
    table, fits = {}, {}
    for p in p_samples:
        norms = [lp_norm(v, w, p) for _, w, v in scans]
        fit, samples = _fit(log_lam, _log(norms), "beta_star")
        fits[p] = (fit, samples)
        table[_p_key(p)] = {"gamma": fit.slope, "stderr": fit.stderr, "residual": fit.residual}
    best = max(p_samples, key=lambda p: fits[p][0].slope)
    fit, samples = fits[best]
    value = min(0.0, fit.slope)
    return RegularityReport("beta_star", value, fit.stderr, samples, K,
                            {"argmax_p": _p_key(best), "unclamped": fit.slope,
                             "clamped": fit.slope > 0}, table)


# --------------------------------------------------------------------------
# local Sobolev exponent


def estimate_local_sobolev(u, x=0.0, radius: float = spectral.LOCALIZER_RADIUS,
                           shells=None) -> RegularityReport:
    """ŝ = r̂ − d/2 from the shell-averaged spectral decay |FT(φu)| ~ |ξ|^{-r̂}.

    For power-law decay, ∫⟨ξ⟩^{2s}|FT(φu)|² dξ ~ ∫ ρ^{2s − 2r + d − 1} dρ,
    which is finite exactly when s < r − d/2.
    """
    dim = u.dim
    shells = tuple(shells or spectral.SHELLS[dim])
    xi, power, ref = spectral.localized_spectrum(u, x, radius)
    norm = np.abs(xi) if dim == 1 else np.linalg.norm(xi, axis=-1)
    means = spectral.shell_means(power, norm, shells)
    region = Region.centered(as_point(x, dim), radius)
    diag = {"radius": radius, "shells": list(shells)}
    if spectral.is_super_polynomial(means, max(float(np.max(power)), ref)):
        diag["smooth"] = True
        return RegularityReport("sobolev", math.inf, 0.0, [], region, diag)
    log_xi = (np.asarray(shells, dtype=float) + 0.5) * math.log(2.0)
    fit, samples = _fit(log_xi, 0.5 * _log(means), "sobolev")
    r_hat = -fit.slope
    diag["aliasing"] = spectral.check_aliasing(
        power, norm, shells[-1], lambda t: fit.intercept + fit.slope * t, u.label)
    diag.update(decay=r_hat, residual=fit.residual)
    return RegularityReport("sobolev", r_hat - dim / 2.0, fit.stderr, samples, region, diag)


# --------------------------------------------------------------------------
# Hölder norms


def holder_norm(u, alpha: float, K: Optional[Region] = None, scales=SCALES, r: int = 2):
    """Discretized C^α(K) norm.

    α < 0: sup over x ∈ K, λ = 2^-n and the plain dictionary of |u(φ^λ_x)| / λ^α.
    α ≥ 0: sup |∂^k u| for k ≤ ⌊α⌋ plus the sup of Taylor remainders / h^α.
    """
    K = K or default_region(u.dim)
    ns = _scales(u, scales)
    if alpha < 0:
        scans = _scan_sup_pairings(u, K, ns, dictionary("plain", u.dim, r=r))
        return max(float(np.max(v)) * 2.0 ** (int(n) * alpha) for n, (_, _, v) in zip(ns, scans))
    jet = _function_jet(u)
    if jet is None:
        raise InsufficientResolution(f"{u.label} has no pointwise jet for a C^{alpha:g} norm")
    m = max(int(math.ceil(alpha)) - 1, 0)
    pts = K.sample(33)
    total = 0.0
    for k in multi_indices(u.dim, m):
        with np.errstate(all="ignore"):
            vals = np.asarray(jet(k, pts), dtype=float)
        total += float(np.max(np.abs(vals[np.isfinite(vals)])))
    rem = taylor_remainders(u, K, m, ns)
    total += float(np.max(rem * 2.0 ** (np.asarray(ns) * alpha)))
    return total
