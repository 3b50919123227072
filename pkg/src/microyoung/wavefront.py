"""Sobolev wavefront sets from cone-restricted spectral energies of localized fields."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import spectral
from .kernels import as_point
from .scans import FINITE_SLOPE, TAIL_OCTAVES, LineFit

S_BRACKET = (-20.0, 20.0)
S_RESOLUTION = 0.05
DECISION_MARGIN = 0.1
N_DIRECTIONS_2D = 16
HALF_ANGLE_2D = math.pi / 8


@dataclass(frozen=True)
class Cone:
    """Open cone around ``direction``; in 1D the half-angle is irrelevant (a ray)."""

    direction: tuple
    half_angle: Optional[float] = None

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).ravel()
        n = float(np.linalg.norm(d))
        if n == 0.0:
            raise ValueError("cone direction must be non-zero")
        object.__setattr__(self, "direction", tuple((d / n).tolist()))
        if len(d) > 1:
            h = HALF_ANGLE_2D if self.half_angle is None else float(self.half_angle)
            if not 0.0 < h < math.pi / 2:
                raise ValueError("half-angle must lie in (0, pi/2)")
            object.__setattr__(self, "half_angle", h)

    @classmethod
    def ray(cls, sign):
        return cls((1.0 if sign > 0 else -1.0,))

    @property
    def dim(self):
        return len(self.direction)

    def opposite(self):
        return Cone(tuple(-v for v in self.direction), self.half_angle)

    def weights(self, xi):
        """Angular weights on grid frequencies; Gaussian taper inside the cone in 2D."""
        d = np.asarray(self.direction)
        if self.dim == 1:
            return (xi * d[0] > 0).astype(float)
        norm = np.linalg.norm(xi, axis=-1)
        cosang = np.divide(xi @ d, norm, out=np.zeros_like(norm), where=norm > 0)
        ang = np.arccos(np.clip(cosang, -1.0, 1.0))
        w = np.exp(-0.5 * (ang / (0.5 * self.half_angle)) ** 2)
        return np.where((ang < self.half_angle) & (norm > 0), w, 0.0)


def default_directions(dim):
    if dim == 1:
        return [(1.0,), (-1.0,)]
    ang = 2 * np.pi * np.arange(N_DIRECTIONS_2D) / N_DIRECTIONS_2D
    return [(float(np.cos(a)), float(np.sin(a))) for a in ang]


@dataclass
class ConeProfile:
    """Per-shell frequency norms and weighted power of φu inside one cone."""

    shells: tuple
    japan: list  # ⟨ξ⟩ per shell
    power: list  # cone weight × |FT(φu)|² per shell
    smooth: bool

    def shell_sums(self, s):
        return np.array([np.sum(jp ** (2 * s) * p) for jp, p in zip(self.japan, self.power)])

    def tail_slope(self, s):
        if self.smooth:
            return -math.inf
        sums = self.shell_sums(s)
        tail = sums[-TAIL_OCTAVES:]
        if np.any(tail <= 0):
            return -math.inf
        return LineFit.of(np.arange(len(tail)), np.log2(tail)).slope


def _profiles(u, x, cones, radius, shells=None):
    dim = u.dim
    shells = tuple(shells or spectral.SHELLS[dim])
    xi, power, ref = spectral.localized_spectrum(u, x, radius)
    norm = np.abs(xi) if dim == 1 else np.linalg.norm(xi, axis=-1)
    idx = spectral.shell_index(norm)
    japan = np.sqrt(1.0 + norm ** 2)
    out = []
    for cone in cones:
        w = cone.weights(xi) * power
        means = spectral.shell_means(w, norm, shells)
        peak = max(float(np.max(w)), ref)
        smooth = spectral.is_super_polynomial(means, peak)
        out.append(ConeProfile(shells, [japan[idx == j] for j in shells],
                               [w[idx == j] for j in shells], smooth))
    return out


@dataclass
class ConeEnergy:
    value: float
    tail_slope: float
    shell_sums: np.ndarray
    smooth: bool = False

    @property
    def finite(self):
        return self.tail_slope <= -FINITE_SLOPE

    @property
    def divergent(self):
        return self.tail_slope >= FINITE_SLOPE

    def __float__(self):
        return float(self.value)


def cone_energy(u, x, cone: Cone, s: float,
                radius: float = spectral.LOCALIZER_RADIUS) -> ConeEnergy:
    """Truncated ∫_Γ ⟨ξ⟩^{2s}|FT(φu)|² with the dyadic-shell tail slope."""
    prof = _profiles(u, x, [cone], radius)[0]
    sums = prof.shell_sums(s)
    return ConeEnergy(float(np.sum(sums)), prof.tail_slope(s), sums, prof.smooth)


def _bisect(prof):
    if prof.smooth:
        return math.inf
    lo, hi = S_BRACKET
    if prof.tail_slope(hi) <= 0:
        return math.inf
    if prof.tail_slope(lo) > 0:
        return -math.inf
    while hi - lo > S_RESOLUTION / 4:
        mid = 0.5 * (lo + hi)
        if prof.tail_slope(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def critical_sobolev_directions(u, x, directions=None, radius=spectral.LOCALIZER_RADIUS,
                                half_angle=None):
    """s* for several directions sharing one localized spectrum."""
    directions = directions or default_directions(u.dim)
    cones = [Cone(d, half_angle) for d in directions]
    return [(c, _bisect(p), p) for c, p in zip(cones, _profiles(u, x, cones, radius))]


def critical_sobolev_direction(u, x, direction, radius=spectral.LOCALIZER_RADIUS,
                               half_angle=None) -> float:
    """sup of s with finite cone energy, by bisection on the tail-slope sign."""
    return critical_sobolev_directions(u, x, [direction], radius, half_angle)[0][1]


@dataclass
class WavefrontEntry:
    x: tuple
    direction: tuple
    critical_s: float
    profile: ConeProfile = field(repr=False, default=None)

    def in_wavefront(self, s):
        """(x, ξ) ∈ WF^s unless the cone energy at s is certified finite."""
        return self.profile.tail_slope(s) > -FINITE_SLOPE

    def to_dict(self):
        cs = self.critical_s
        return {"x": list(self.x), "direction": list(self.direction),
                "critical_s": cs if math.isfinite(cs) else ("inf" if cs > 0 else "-inf")}


@dataclass
class WavefrontReport:
    entries: list
    s_queried: Optional[float]
    radius: float
    half_angle: Optional[float] = None

    def flagged(self, s=None):
        s = self.s_queried if s is None else s
        return [(e.x, e.direction) for e in self.entries if e.in_wavefront(s)]

    def to_dict(self):
        out = {"radius": self.radius, "half_angle": self.half_angle,
               "family": "cutoff x gaussian localizer; tapered cones",
               "entries": [e.to_dict() for e in self.entries]}
        if self.s_queried is not None:
            out["s_queried"] = self.s_queried
            out["flagged"] = [{"x": list(x), "direction": list(d)} for x, d in self.flagged()]
        return out

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "direction", "critical_s", "tail_slope_at_s"])
            for e in self.entries:
                slope = e.profile.tail_slope(self.s_queried) if self.s_queried is not None else ""
                w.writerow([" ".join(f"{v:g}" for v in e.x),
                            " ".join(f"{v:g}" for v in e.direction),
                            e.critical_s, slope])
        return path

    def critical_map(self):
        """Matrix of s* with one row per point and one column per direction."""
        xs = sorted({e.x for e in self.entries})
        ds = sorted({e.direction for e in self.entries})
        m = np.full((len(xs), len(ds)), np.nan)
        for e in self.entries:
            m[xs.index(e.x), ds.index(e.direction)] = e.critical_s
        return xs, ds, m


def wavefront_set(u, points: Sequence, s: Optional[float] = None, directions=None,
                  radius=spectral.LOCALIZER_RADIUS, half_angle=None) -> WavefrontReport:
    entries = []
    for x in points:
        xt = tuple(as_point(x, u.dim).tolist())
        for cone, crit, prof in critical_sobolev_directions(u, xt, directions, radius,
                                                             half_angle):
            entries.append(WavefrontEntry(xt, cone.direction, crit, prof))
    entries.sort(key=lambda e: (e.x, e.direction))
    ha = None if u.dim == 1 else (HALF_ANGLE_2D if half_angle is None else half_angle)
    return WavefrontReport(entries, s, radius, ha)


@dataclass
class ProductCriterion:
    decision: str  # "pass", "fail" or "inconclusive"
    pairs: list

    def to_dict(self):
        def num(v):
            return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
        return {"decision": self.decision,
                "pairs": [{k: (num(v) if isinstance(v, float) else v) for k, v in p.items()}
                          for p in self.pairs]}


def pairwise_product_criterion(f, g, x_grid, dir_grid=None,
                               radius=spectral.LOCALIZER_RADIUS) -> ProductCriterion:
    """Per (x, ξ): s*_f(x, ξ) + s*_g(x, −ξ) ≥ 0, with ±0.1 reported as inconclusive."""
    dir_grid = dir_grid or default_directions(f.dim)
    opp = [tuple(-v for v in d) for d in dir_grid]
    pairs = []
    for x in x_grid:
        sf = critical_sobolev_directions(f, x, dir_grid, radius)
        sg = critical_sobolev_directions(g, x, opp, radius)
        for (cone, a, _), (_, b, _) in zip(sf, sg):
            margin = a + b if not (math.isinf(a) and math.isinf(b) and a != b) else math.inf
            if abs(margin) < DECISION_MARGIN:
                status = "inconclusive"
            else:
                status = "pass" if margin >= 0 else "fail"
            pairs.append({"x": list(as_point(x, f.dim).tolist()), "direction": list(cone.direction),
                          "s_f": a, "s_g": b, "margin": margin, "status": status})
    statuses = {p["status"] for p in pairs}
    decision = "fail" if "fail" in statuses else (
        "inconclusive" if "inconclusive" in statuses else "pass")
    return ProductCriterion(decision, pairs)
