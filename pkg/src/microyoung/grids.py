"""Periodic grids: cell-average rendering of kernels, FFT helpers, grid-file IO."""
from __future__ import annotations

import json
import math
import struct
import warnings
from pathlib import Path

import numpy as np

from .errors import AliasingWarning, DomainMismatch, NonIntegrableSingularity
from .kernels import (DOMAIN_LOWER, DOMAIN_UPPER, EVERYWHERE, DiracDelta, GridField,
                      LogDerivative, PowerLaw, SmoothFunction, SmoothProduct, Sum)

GRID_SIZE = {1: 4096, 2: 512}
_MAGIC = b"MYGRID01"


def spacing(n):
    return (DOMAIN_UPPER - DOMAIN_LOWER) / n


def axis(n):
    return DOMAIN_LOWER + spacing(n) * np.arange(n)


def coordinates(n, dim):
    ax = axis(n)
    if dim == 1:
        return ax
    g = np.meshgrid(ax, ax, indexing="ij")
    return np.stack(g, axis=-1)


def frequencies(n, dim):
    """Angular frequencies on the grid; shape (n,) or (n, n, 2)."""
    k = 2 * np.pi * np.fft.fftfreq(n, d=spacing(n))
    if dim == 1:
        return k
    g = np.meshgrid(k, k, indexing="ij")
    return np.stack(g, axis=-1)


def frequency_norm(n, dim):
    xi = frequencies(n, dim)
    return np.abs(xi) if dim == 1 else np.linalg.norm(xi, axis=-1)


def fourier(samples):
    """Riemann-sum approximation of the continuous Fourier transform."""
    n = samples.shape[0]
    return np.fft.fftn(samples) * spacing(n) ** samples.ndim


def nyquist_taper(n, dim):
    """Smooth low-pass equal to 1 below half the Nyquist frequency and 0 at Nyquist."""
    from .dyadic import low_pass
    half = 0.5 * np.pi / spacing(n)
    return low_pass(frequency_norm(n, dim) / half)


def _gauss_cells(fn, n, dim, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    h = spacing(n)
    ax = axis(n)
    if dim == 1:
        pts = ax[:, None] + 0.5 * h * nodes[None, :]
        vals = fn(pts.ravel()).reshape(pts.shape)
        return vals @ weights / 2.0
    out = np.zeros((n, n))
    for a, wa in zip(nodes, weights):
        for b, wb in zip(nodes, weights):
            p = coordinates(n, 2) + 0.5 * h * np.array([a, b])
            out += wa * wb * fn(p.reshape(-1, 2)).reshape(n, n)
    return out / 4.0


def _render_delta(u, n):
    dim = u.dim
    xi = frequencies(n, dim)
    c = np.array(u.center)
    if dim == 1:
        ft = np.exp(-1j * xi * (c[0] - DOMAIN_LOWER)) * (1j * xi) ** u.derivative[0]
    else:
        shift = (c - DOMAIN_LOWER)
        ft = np.exp(-1j * (xi[..., 0] * shift[0] + xi[..., 1] * shift[1]))
        ft = ft * (1j * xi[..., 0]) ** u.derivative[0] * (1j * xi[..., 1]) ** u.derivative[1]
    if u.order:
        # odd symbols jump across the Nyquist wrap; taper to avoid grid-scale ringing
        ft = ft * nyquist_taper(n, dim)
    return np.real(np.fft.ifftn(ft)) / spacing(n) ** dim


def _square_average(a):
    """(1/|Q|) int_Q |z|^a dz over the unit square Q centred at 0."""
    from scipy import integrate
    val, _ = integrate.quad(lambda t: (0.5 / math.cos(t)) ** (a + 2), 0.0, math.pi / 4)
    return 8.0 * val / (a + 2.0)


def _render_powerlaw(u, n):
    if not u.integrable:
        raise NonIntegrableSingularity(f"cannot render {u.label}: exponent <= -dim")
    h = spacing(n)
    c = np.array(u.center)
    a = u.exponent
    if u.dim == 1:
        x = axis(n) - c[0]
        prim = lambda y: np.sign(y) * np.abs(y) ** (a + 1) / (a + 1)
        return (prim(x + h / 2) - prim(x - h / 2)) / h
    out = _gauss_cells(lambda p: np.linalg.norm(p - c, axis=1) ** a, n, 2, 6)
    idx = np.round((c - DOMAIN_LOWER) / h).astype(int)
    if np.allclose(DOMAIN_LOWER + idx * h, c) and np.all((idx >= 0) & (idx < n)):
        out[idx[0], idx[1]] = h ** a * _square_average(a)
    return out


def _render_logderiv(u, n):
    # periodic principal value (pi/2) cot(pi x/2) has Fourier coefficients
    # -i pi sign(k) exactly; the difference to 1/x is smooth on |x| < 2
    c = u.center[0]
    xi = frequencies(n, 1)
    ft = -1j * np.pi * np.sign(xi) * np.exp(-1j * xi * (c - DOMAIN_LOWER))
    ft *= nyquist_taper(n, 1)
    periodic = np.real(np.fft.ifft(ft)) / spacing(n)
    x = axis(n) - c
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = 1.0 / x - (np.pi / 2) / np.tan(np.pi * x / 2)
    corr[np.abs(x) < 1e-12] = 0.0
    return periodic + np.nan_to_num(corr)


def render(u, n=None):
    """Cell averages of ``u`` on the n-point (per axis) periodic grid."""
    dim = u.dim
    n = n or GRID_SIZE[dim]
    if isinstance(u, DiracDelta):
        return _render_delta(u, n)
    if isinstance(u, PowerLaw):
        return _render_powerlaw(u, n)
    if isinstance(u, LogDerivative):
        return _render_logderiv(u, n)
    if isinstance(u, SmoothFunction):
        return _gauss_cells(u.func, n, dim, 8 if dim == 1 else 4)
    if isinstance(u, GridField):
        return _resample(u.samples, n)
    if isinstance(u, Sum):
        return sum(w * render(t, n) for w, t in u.terms)
    if isinstance(u, SmoothProduct):
        pts = coordinates(n, dim)
        fac = u.factor.func(pts if dim == 1 else pts.reshape(-1, 2)).reshape((n,) * dim)
        return fac * render(u.inner, n)
    raise TypeError(f"cannot render {type(u).__name__}")


def _resample(samples, n):
    m = samples.shape[0]
    if m == n:
        return samples
    dim = samples.ndim
    ft = np.fft.fftshift(np.fft.fftn(samples))
    if n < m:
        lo = (m - n) // 2
        sl = tuple(slice(lo, lo + n) for _ in range(dim))
        kept = ft[sl]
        lost = 1.0 - np.sum(np.abs(kept) ** 2) / max(np.sum(np.abs(ft) ** 2), 1e-300)
        if lost > 1e-3:
            warnings.warn(f"resampling {m}->{n} drops {lost:.1%} of the spectral energy",
                          AliasingWarning, stacklevel=3)
        new = kept
    else:
        lo = (n - m) // 2
        new = np.zeros((n,) * dim, dtype=complex)
        new[tuple(slice(lo, lo + m) for _ in range(dim))] = ft
    scale = (n / m) ** dim
    return np.real(np.fft.ifftn(np.fft.ifftshift(new))) * scale


# --------------------------------------------------------------------------
# grid-file IO


def _header(samples):
    return {"dimension": samples.ndim, "sizes": list(samples.shape),
            "lower": DOMAIN_LOWER, "upper": DOMAIN_UPPER}


def save_grid_field(path, samples):
    """Write samples as ``.csv`` (JSON header comment line) or flat binary."""
    path = Path(path)
    samples = np.asarray(samples, dtype=float)
    header = json.dumps(_header(samples), sort_keys=True)
    if path.suffix == ".csv":
        rows = samples.reshape(samples.shape[0], -1)
        with open(path, "w") as fh:
            fh.write(f"# {header}\n")
            np.savetxt(fh, rows, delimiter=",", fmt="%.17g")
    else:
        hb = header.encode()
        with open(path, "wb") as fh:
            fh.write(_MAGIC + struct.pack("<I", len(hb)) + hb)
            fh.write(samples.astype("<f8").tobytes(order="C"))
    return path


def load_grid_field(path, singsupp=EVERYWHERE, label=None):
    path = Path(path)
    if path.suffix == ".csv":
        with open(path) as fh:
            first = fh.readline()
            if not first.startswith("#"):
                raise DomainMismatch(f"{path}: missing '# {{header}}' line")
            header = json.loads(first[1:])
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    else:
        raw = path.read_bytes()
        if raw[:8] != _MAGIC:
            raise DomainMismatch(f"{path}: not a grid file")
        (hl,) = struct.unpack("<I", raw[8:12])
        header = json.loads(raw[12:12 + hl])
        data = np.frombuffer(raw[12 + hl:], dtype="<f8")
    if (header["lower"], header["upper"]) != (DOMAIN_LOWER, DOMAIN_UPPER):
        raise DomainMismatch(f"{path}: domain must be [{DOMAIN_LOWER}, {DOMAIN_UPPER})")
    samples = np.asarray(data, dtype=float).reshape(header["sizes"])
    return GridField.make(samples, singsupp, label=label or f"grid:{path.name}")
