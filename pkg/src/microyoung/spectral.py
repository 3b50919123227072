"""Localized spectra and dyadic shell statistics."""
from __future__ import annotations

import math
import warnings

import numpy as np

from . import grids
from .dyadic import _smooth_step
from .errors import AliasingWarning, DomainMismatch
from .kernels import DOMAIN_LOWER, DOMAIN_UPPER, SmoothFunction, as_point

LOCALIZER_RADIUS = 0.25
# shells [2^j, 2^{j+1}) used for decay fits
SHELLS = {1: tuple(range(6, 11)), 2: tuple(range(4, 9))}
# amplitude ratio (last shell / peak) below which decay counts as super-polynomial
SMOOTH_FLOOR = 1e-13


def localizer(x, radius=LOCALIZER_RADIUS, dim=1):
    """Compactly supported cutoff times a Gaussian, centred at ``x``.

    The cutoff is 1 on |y - x| <= radius/2 and 0 beyond radius; the
    Gaussian (width radius/4) makes the transition region negligible, so
    the smooth part of the localized field has a fast-decaying spectrum.
    """
    c = as_point(x, dim)
    if np.any(c - radius < DOMAIN_LOWER - 1e-12) or np.any(c + radius > DOMAIN_UPPER + 1e-12):
        raise DomainMismatch(f"localizer of radius {radius} at {c.tolist()} leaves the domain")
    sigma = radius / 4.0

    def func(y):
        y = np.asarray(y, dtype=float)
        pts = y.reshape(-1, 1) if dim == 1 else y.reshape(-1, dim)
        r = np.linalg.norm(pts - c, axis=1)
        cut = _smooth_step((radius - r) / (radius / 2.0))
        out = cut * np.exp(-0.5 * (r / sigma) ** 2)
        return out.reshape(y.shape[:-1] if dim > 1 else y.shape)

    return SmoothFunction(dim=dim, declared_singsupp=(), label=f"loc@{c.tolist()}:{radius:g}",
                          func=func)


def localized_spectrum(u, x, radius=LOCALIZER_RADIUS, n=None):
    """|FT(φu)|² on the grid frequencies, plus a magnitude reference.

    The reference is the squared L1 mass of the unlocalized rendering, an
    upper bound for |FT(u)|² used to recognise round-off level spectra.
    """
    dim = u.dim
    n = n or grids.GRID_SIZE[dim]
    raw = grids.render(u, n)
    loc = localizer(x, radius, dim)
    pts = grids.coordinates(n, dim)
    fac = loc.func(pts if dim == 1 else pts.reshape(-1, dim)).reshape(raw.shape)
    power = np.abs(grids.fourier(fac * raw)) ** 2
    reference = float(np.sum(np.abs(raw)) * grids.spacing(n) ** dim) ** 2
    return grids.frequencies(n, dim), power, reference


def shell_index(xi_norm):
    with np.errstate(divide="ignore"):
        return np.floor(np.log2(np.where(xi_norm > 0, xi_norm, 0.5))).astype(int)


def shell_sums(weights, xi_norm, shells):
    idx = shell_index(xi_norm)
    return np.array([np.sum(weights[idx == j]) for j in shells])


def shell_means(weights, xi_norm, shells):
    idx = shell_index(xi_norm)
    return np.array([np.mean(weights[idx == j]) if np.any(idx == j) else 0.0 for j in shells])


def is_super_polynomial(shell_power, peak):
    """Decay faster than any power: round-off floor reached, or accelerating octave rates.

    ``peak`` is the largest power the field could carry; amplitudes at
    round-off relative to it count as zero.
    """
    amp = np.sqrt(np.maximum(np.asarray(shell_power, dtype=float), 0.0))
    if peak <= 0.0 or amp[-1] <= SMOOTH_FLOOR * math.sqrt(peak):
        return True
    rates = -np.diff(np.log2(amp))
    return bool(np.all(np.diff(rates) > 0.5) and rates[-1] > 4.0)


def check_aliasing(power, xi_norm, last_shell, log_amp_fit, label=""):
    """Warn when the band above the fitted shells exceeds the fitted power law by 4x.

    ``log_amp_fit`` maps log|ξ| to the fitted log amplitude.
    """
    nyq = float(np.max(xi_norm))
    above = (xi_norm >= 2.0 ** (last_shell + 1)) & (xi_norm < nyq / 1.5)
    if not np.any(above):
        return False
    predicted = np.exp(2.0 * log_amp_fit(np.log(xi_norm[above])))
    if np.mean(power[above]) > 4.0 * np.mean(predicted):
        warnings.warn(f"{label}: spectral energy near Nyquist exceeds the fitted decay; "
                      f"the field is not resolved by the grid", AliasingWarning, stacklevel=3)
        return True
    return False
