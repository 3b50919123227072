"""Kernel identifiers such as ``delta@0``, ``cusp@0:0.6`` or ``2*delta@0+powerlaw@0.5:-0.5``."""
from __future__ import annotations

import re

from .errors import UnknownKernel
from .kernels import (DiracDelta, LogDerivative, PowerLaw, Sum, constant, cusp,
                      smooth_bump_function, white_noise)

_TERM = re.compile(r"^(?:(?P<w>[-+]?\d*\.?\d+(?:e[-+]?\d+)?)\*)?(?P<name>[a-z][a-z0-9\-]*)(?P<primes>'*)"
                   r"(?:@(?P<at>[^:]+))?(?::(?P<arg>.+))?$")

KERNEL_IDS = ("delta@c", "delta'@c", "powerlaw@c:a", "cusp@c:a", "logderiv@c", "constant-1",
              "const:v", "bump@c:R", "noise:seed")

# fixed catalog exercised by the acceptance sweeps
CATALOG_1D = ("delta@0", "delta'@0", "powerlaw@0:-0.5", "powerlaw@0:-0.75", "powerlaw@0:-0.9",
              "cusp@0:0.6", "cusp@0:1.5", "logderiv@0", "constant-1", "bump@0:0.5")


def _center(text, dim):
    if text is None:
        return 0.0 if dim == 1 else (0.0,) * dim
    vals = [float(v) for v in text.split(",")]
    if len(vals) == 1:
        vals = vals * dim
    if len(vals) != dim:
        raise UnknownKernel(f"center {text!r} does not have {dim} coordinates")
    return vals[0] if dim == 1 else tuple(vals)


def _split_terms(text):
    # '+' separates terms unless it belongs to an exponent like 1e+3
    parts, start = [], 0
    for i, ch in enumerate(text):
        if ch == "+" and i > start and text[i - 1] not in "eE*:@,":
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def _single(text, dim):
    m = _TERM.match(text)
    if not m:
        raise UnknownKernel(f"cannot parse kernel id {text!r}; expected one of {KERNEL_IDS}")
    name, primes, at, arg = m["name"], len(m["primes"]), m["at"], m["arg"]
    try:
        if name == "delta":
            k = (primes,) if dim == 1 else ((primes,) + (0,) * (dim - 1) if primes else ())
            return DiracDelta.make(_center(at, dim), k if primes else (), dim)
        if name == "powerlaw":
            return PowerLaw.make(_center(at, dim), float(arg), dim)
        if name == "cusp":
            return cusp(_center(at, dim), float(arg), dim)
        if name == "logderiv":
            if dim != 1:
                raise UnknownKernel("logderiv is one-dimensional")
            return LogDerivative.make(_center(at, 1))
        if name == "constant-1":
            return constant(1.0, dim)
        if name == "const":
            return constant(float(arg), dim)
        if name == "bump":
            return smooth_bump_function(_center(at, dim), float(arg) if arg else 0.5, dim)
        if name == "noise":
            return white_noise(dim=dim, seed=int(arg) if arg else 0,
                               n=4096 if dim == 1 else 512)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UnknownKernel):
            raise
        raise UnknownKernel(f"bad arguments in kernel id {text!r}: {exc}") from exc
    raise UnknownKernel(f"unknown kernel {name!r} in {text!r}; expected one of {KERNEL_IDS}")


def parse_kernel(text: str, dim: int = 1):
    """Build a kernel from its identifier; '+' joins terms, 'w*' weights one."""
    if dim not in (1, 2):
        raise UnknownKernel(f"dimension must be 1 or 2, got {dim}")
    terms = []
    for part in _split_terms(text.strip()):
        m = _TERM.match(part)
        w = float(m["w"]) if m and m["w"] else 1.0
        terms.append((w, _single(part, dim)))
    if not terms:
        raise UnknownKernel("empty kernel id")
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1]
    return Sum(dim=dim, terms=tuple(terms), label=text.strip())
