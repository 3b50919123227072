"""Reference checks against closed-form values from the theory, run as a pass/fail table."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import parse_kernel
from .extension import multiply_and_extend, scaling_degree
from .germs import product_germ, reconstruct_product_germ, verify_reconstruction_bound
from .kernels import pair
from .product import check_young_classical, check_young_microlocal, young_product
from .regularity import estimate_beta_star, estimate_holder_exponent
from .testfn import TestFunction, make_bump
from .wavefront import critical_sobolev_direction


@dataclass
class CheckResult:
    name: str
    target: str
    measured: object
    passed: bool

    def to_dict(self):
        m = self.measured
        if isinstance(m, float) and not math.isfinite(m):
            m = "inf" if m > 0 else "-inf"
        return {"name": self.name, "target": self.target, "measured": m, "pass": self.passed}


def _within(v, target, tol):
    return bool(abs(v - target) <= tol)


def _beta_star_delta():
    v1 = estimate_beta_star(parse_kernel("delta@0")).value
    v2 = estimate_beta_star(parse_kernel("delta@0", 2)).value
    return [CheckResult("beta_star delta d=1", "-0.5 +- 0.1", v1, _within(v1, -0.5, 0.1)),
            CheckResult("beta_star delta d=2", "-1.0 +- 0.15", v2, _within(v2, -1.0, 0.15))]


def _beta_star_powerlaws():
    out = []
    for b in (-0.75, -0.9):
        v = estimate_beta_star(parse_kernel(f"powerlaw@0:{b}")).value
        out.append(CheckResult(f"beta_star |x|^{b}", f"{b + 0.5:g} +- 0.1", v,
                               _within(v, b + 0.5, 0.1)))
    return out


def _scaling_degree_delta():
    out = []
    for d in (1, 2):
        v = scaling_degree(parse_kernel("delta@0", d), 0.0).value
        out.append(CheckResult(f"scaling degree delta d={d}", f"{d} +- 0.05", v,
                               _within(v, d, 0.05)))
    return out


def _gate():
    f, g = parse_kernel("cusp@0:1"), parse_kernel("delta@0")
    classical = check_young_classical(1.0, -1.0)
    adm = check_young_microlocal(f, g)
    margin = adm.ledger[0].margin if adm.ledger else math.nan
    ok = (not classical.admissible and adm.decision == "AdmissibleMicrolocal"
          and _within(margin, 0.5, 0.1))
    return [CheckResult("cusp |x| times delta: classical rejects, ledger margin",
                        "0.5 +- 0.1", margin, ok)]


def _delta_product(n_tests=20, seed=0):
    fs = parse_kernel("cusp@0:1.5") + parse_kernel("const:1.5")
    prod = young_product(fs, parse_kernel("delta@0"))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_tests):
        R = rng.uniform(0.1, 0.5)
        phi = TestFunction(make_bump(1.0).profile, radius=R, center=rng.uniform(-R / 2, R / 2))
        ref = 1.5 * float(phi(np.array([0.0]))[0])
        worst = max(worst, abs(pair(prod, phi) - ref) / abs(ref))
    return [CheckResult("f delta = f(0) delta, 20 random tests", "rel err <= 1e-8", worst,
                        worst <= 1e-8)]


def _one_parameter_family():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ext = multiply_and_extend(parse_kernel("powerlaw@0:-0.5"), parse_kernel("powerlaw@0:-0.5"))
    fam = ext.family
    phi = TestFunction(make_bump(1.0).profile, radius=0.4, center=0.1)
    diff = fam.pair(phi, {(0,): 1.0}) - fam.pair(phi) - float(phi(np.array([0.0]))[0])
    ok = _within(fam.rho, 0.0, 0.1) and not fam.unique and abs(diff) < 1e-12
    return [CheckResult("|x|^-1/2 squared: one free coefficient at rho = 0",
                        "rho 0 +- 0.1, members differ by a0 psi(0)", fam.rho, ok)]


def _wavefront_delta():
    d = parse_kernel("delta@0")
    vals = [critical_sobolev_direction(d, 0.0, (s,)) for s in (1.0, -1.0)]
    return [CheckResult("critical Sobolev index of delta, both rays", "-0.5 +- 0.1",
                        max(vals, key=lambda v: abs(v + 0.5)),
                        all(_within(v, -0.5, 0.1) for v in vals))]


def _reconstruction_at_zero():
    F = product_germ(parse_kernel("cusp@0:1"), parse_kernel("delta@0"), alpha=1.0, beta=-1.0)
    rep = verify_reconstruction_bound(F, reconstruct_product_germ(F))
    return [CheckResult("reconstruction bound at alpha + beta = 0", "slope >= -0.1",
                        rep.slope, rep.slope >= -0.1)]


def _noise():
    n = parse_kernel("noise:0")
    adm = check_young_microlocal(n, n)
    return [CheckResult("white noise negative control", "NotAdmissible (everywhere)",
                        adm.reason, adm.decision == "NotAdmissible"
                        and adm.reason == "singular support everywhere")]


def _holder_delta():
    rep = estimate_holder_exponent(parse_kernel("delta@0"))
    ok = _within(rep.value, -1.0, 0.1) and rep.diagnostics.get("residual", 1.0) < 1e-8
    return [CheckResult("Hoelder exponent of delta", "-1 +- 0.1, residual < 1e-8", rep.value, ok)]


CHECKS = (_beta_star_delta, _beta_star_powerlaws, _holder_delta, _scaling_degree_delta, _gate,
          _delta_product, _one_parameter_family, _wavefront_delta, _reconstruction_at_zero,
          _noise)


def run_suite():
    results = []
    for check in CHECKS:
        try:
            results.extend(check())
        except Exception as exc:  # a crashing check is a failing check
            results.append(CheckResult(check.__name__.strip("_"), "no error",
                                       f"{type(exc).__name__}: {exc}", False))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        m = r.measured
        shown = f"{m:.6g}" if isinstance(m, float) else str(m)
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  "
                     f"measured {shown}  (target {r.target})")
    return "\n".join(lines)
