"""Scale scans: x-node layouts, L^p(K) quadrature, vectorised scaled pairings, slope fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatch
from .kernels import (DOMAIN_LOWER, DOMAIN_UPPER, DiracDelta, Sum, as_point, pair_scaled,
                      pointwise)

N_PER_AXIS = 33
N_LOCAL = 33
N_SHELLS = 24
N_ANGLES = 32
TAIL_OCTAVES = 4
FINITE_SLOPE = 0.05


def floor_below(alpha):
    """Largest integer strictly below ``alpha``."""
    return int(math.ceil(alpha)) - 1


@dataclass
class LineFit:
    slope: float
    intercept: float
    stderr: float
    residual: float

    @classmethod
    def of(cls, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        A = np.column_stack([x, np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        res = y - A @ coef
        n = len(x)
        sxx = np.sum((x - x.mean()) ** 2)
        stderr = math.sqrt(np.sum(res ** 2) / (n - 2) / sxx) if n > 2 and sxx > 0 else 0.0
        return cls(float(coef[0]), float(coef[1]), float(stderr),
                   float(np.sqrt(np.mean(res ** 2))))


def tail_slope(log2_terms, octaves=TAIL_OCTAVES):
    """Least-squares slope per octave of the last ``octaves`` entries."""
    y = np.asarray(log2_terms, dtype=float)[-octaves:]
    return LineFit.of(np.arange(len(y)), y).slope


# --------------------------------------------------------------------------
# x-node layouts


def _trapezoid_weights(x):
    w = np.zeros_like(x)
    if len(x) > 1:
        d = np.diff(x)
        w[:-1] += d / 2
        w[1:] += d / 2
    return w


def _relevant_points(K, points):
    lo, hi = K.clipped()
    out = []
    for c in points:
        if np.all(c >= lo - 1e-12) and np.all(c <= hi + 1e-12):
            out.append(np.asarray(c, dtype=float))
    return out


def lp_nodes(K, lam, singular_points=()):
    """Quadrature nodes and weights on K adapted to scale ``lam``.

    The uniform sample is refined near every singular point inside K with
    nodes that scale with ``lam`` so that the relative resolution of a
    concentrated integrand is the same at every scale.
    """
    dim = K.dim
    lo, hi = K.clipped()
    sing = _relevant_points(K, singular_points)
    if dim == 1:
        parts = [np.linspace(lo[0], hi[0], N_PER_AXIS)]
        span = hi[0] - lo[0]
        for c in sing:
            parts.append(c[0] + lam * np.linspace(-2, 2, N_LOCAL))
            if span / lam > 2:
                shells = lam * np.geomspace(2, span / lam, N_SHELLS)
                parts += [c[0] + shells, c[0] - shells]
        x = np.unique(np.concatenate(parts))
        x = x[(x >= lo[0]) & (x <= hi[0])]
        x = x[K.contains(x)]
        return x, _trapezoid_weights(x)
    return _nodes_2d(K, lo, hi, lam, sing)


def _nodes_2d(K, lo, hi, lam, sing):
    axes = [np.linspace(a, b, N_PER_AXIS) for a, b in zip(lo, hi)]
    cell = np.prod([(b - a) / (N_PER_AXIS - 1) for a, b in zip(lo, hi)])
    g = np.meshgrid(*axes, indexing="ij")
    grid = np.column_stack([v.ravel() for v in g])
    wgrid = np.full(len(grid), cell)
    # trapezoid edge factors
    for ax in range(2):
        edge = np.isclose(grid[:, ax], lo[ax]) | np.isclose(grid[:, ax], hi[ax])
        wgrid[edge] *= 0.5
    pts, wts = [], []
    keep = np.ones(len(grid), dtype=bool)
    theta = 2 * np.pi * np.arange(N_ANGLES) / N_ANGLES
    for c in sing:
        R = float(min(np.min(c - lo), np.min(hi - c)))
        if R <= 2 * lam:
            continue
        keep &= np.linalg.norm(grid - c, axis=1) > R
        radii = np.unique(np.concatenate([lam * np.linspace(0, 2, 17),
                                          lam * np.geomspace(2, R / lam, 16)]))
        wr = _trapezoid_weights(radii) * radii * (2 * np.pi / N_ANGLES)
        for r, w in zip(radii[1:], wr[1:]):
            pts.append(c + r * np.column_stack([np.cos(theta), np.sin(theta)]))
            wts.append(np.full(N_ANGLES, w))
        pts.append(c[None, :])
        wts.append(np.zeros(1))
    pts.append(grid[keep])
    wts.append(wgrid[keep])
    pts = np.concatenate(pts)
    wts = np.concatenate(wts)
    inside = K.contains(pts)
    return pts[inside], wts[inside]


def lp_norm(values, weights, p):
    v = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return float(np.max(v)) if v.size else 0.0
    return float(np.sum(weights * v ** p) ** (1.0 / p))


# --------------------------------------------------------------------------
# pairings


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(160)
_GL_NODES_2D, _GL_WEIGHTS_2D = np.polynomial.legendre.leggauss(64)
FAR_RATIO = 1.25


def _reference_rule(phi, dim):
    """Nodes/weights integrating over the support of ``phi`` (unscaled)."""
    if dim == 1:
        t = phi.center[0] + phi.radius * _GL_NODES
        return t[:, None], _GL_WEIGHTS * phi.radius * phi(t)
    a, b = np.meshgrid(_GL_NODES_2D, _GL_NODES_2D, indexing="ij")
    t = phi.center + phi.radius * np.column_stack([a.ravel(), b.ravel()])
    w = np.outer(_GL_WEIGHTS_2D, _GL_WEIGHTS_2D).ravel() * phi.radius ** 2 * phi(t)
    keep = w != 0
    return t[keep], w[keep]


def _far_pairings(f, phi, pts, lam):
    """Fixed-rule pairings of a pointwise kernel whose singularities avoid the support."""
    t, w = _reference_rule(phi, pts.shape[1])
    out = np.empty(len(pts))
    for i0 in range(0, len(pts), 256):
        block = pts[i0:i0 + 256]
        y = block[:, None, :] + lam * t[None, :, :]
        vals = f(y.reshape(-1, pts.shape[1]) if pts.shape[1] > 1 else y.reshape(-1))
        out[i0:i0 + 256] = np.asarray(vals).reshape(len(block), -1) @ w
    return out


def _check_domain(phi, pts, lam):
    c = pts + lam * phi.center
    r = lam * phi.radius
    if np.any(c - r < DOMAIN_LOWER - 1e-9) or np.any(c + r > DOMAIN_UPPER + 1e-9):
        raise DomainMismatch("scaled test support leaves the domain [-1, 1]^d")


def scaled_pairings(u, phi, points, lam):
    """``u(phi^lam_x)`` for every x in ``points``."""
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(-1, 1) if u.dim == 1 else pts.reshape(-1, u.dim)
    if isinstance(u, Sum):
        return sum(w * scaled_pairings(t, phi, pts, lam) for w, t in u.terms)
    if isinstance(u, DiracDelta):
        t = (np.array(u.center)[None, :] - pts) / lam
        vals = phi.deriv(u.derivative, t if u.dim > 1 else t[:, 0])
        return (-1) ** u.order * lam ** (-u.dim - u.order) * np.asarray(vals).ravel()
    out = np.empty(len(pts))
    far = np.zeros(len(pts), dtype=bool)
    f = pointwise(u) if not u.singular_everywhere else None
    if f is not None:
        _check_domain(phi, pts, lam)
        centers = pts + lam * phi.center
        far[:] = True
        for s in u.singular_points():
            far &= np.linalg.norm(centers - s, axis=1) > FAR_RATIO * lam * phi.radius
        if far.any():
            out[far] = _far_pairings(f, phi, pts[far], lam)
    for i in np.flatnonzero(~far):
        out[i] = pair_scaled(u, phi, as_point(pts[i], u.dim), lam)
    return out


def sup_pairings(u, tests, points, lam):
    """Pointwise sup over a dictionary of ``|u(phi^lam_x)|``."""
    return np.max([np.abs(scaled_pairings(u, phi, points, lam)) for phi in tests], axis=0)
