"""Named invariant checks run by ``fracnls validate``.

Each check measures one identity or inequality on the configured case and
reports ``passed``, the measured number and its tolerance. Checks that do
not apply to the parameters (for example the instability signs in the
mass-subcritical regime) are reported with status ``"n/a"``.
"""
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import evolution as ev
from . import functionals as fn
from . import ground_state as gs
from . import sampling
from . import spectral
from . import virial
from .errors import FracNLSError


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "n/a"
    measured: float
    tolerance: float
    note: str = ""

    @property
    def passed(self):
        return self.status != "fail"


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": {
                c.name: {
                    "status": c.status,
                    "pass": c.passed,
                    "measured": None if c.measured is None or not math.isfinite(c.measured) else c.measured,
                    "tolerance": c.tolerance,
                    "note": c.note,
                }
                for c in self.checks
            },
        }


class Context:
    """Lazily solved ground state and shared objects for one config."""

    def __init__(self, cfg, seed=0):
        self.cfg = cfg
        self.params = cfg.params
        self.grid = cfg.grid
        self.rng = np.random.default_rng(seed)

    @cached_property
    def ground(self):
        return gs.solve(self.params, self.grid)

    @property
    def supercritical(self):
        return self.params.mass_supercritical

    def gaussian(self):
        g = self.grid
        r2 = sum(c * c for c in g.coords)
        ph = sum(0.3 * c for c in g.coords)
        return 1.0 * np.exp(-r2 / 2) * np.exp(1j * ph)


def _res(name, measured, tol, note="", le=True):
    ok = measured <= tol if le else measured >= tol
    return CheckResult(name, "pass" if ok and math.isfinite(measured) else "fail", float(measured), tol, note)


def check_ground_state(ctx):
    return _res("ground_state_residual", ctx.ground.final_residual, 1e-8, f"{ctx.ground.iterations} iterations")


def check_pohozaev(ctx):
    p = ctx.ground.pohozaev
    return _res("pohozaev", max(p.r1, p.r2), 1e-6, f"r1={p.r1:.3e} r2={p.r2:.3e}")


def check_nehari_virial_zero(ctx):
    rep = ctx.ground.report
    k = abs(rep.K_omega) / rep.h_omega
    i = abs(rep.I) / (ctx.params.s * rep.hs_seminorm_sq)
    return _res("ground_state_K_I_zero", max(k, i), 1e-6, f"|K|/H={k:.3e} |I|/(s hs)={i:.3e}")


def check_gn_saturation(ctx):
    rep = ctx.ground.report
    c = fn.sharp_gn_constant(ctx.params, rep.mass)
    return _res("gn_saturation", abs(c * rep.J - 1.0), 1e-6, f"C_opt={c:.10g}")


def check_gn_inequality(ctx, n=50):
    c = fn.sharp_gn_constant(ctx.params, ctx.ground.report.mass)
    worst = max(fn.gn_ratio(ctx.grid, sampling.random_smooth_field(ctx.grid, ctx.rng), ctx.params, c) for _ in range(n))
    return _res("gn_inequality", worst - 1.0, 1e-10, f"max ratio over {n} random fields = {worst:.6f}")


def check_quadrature(ctx):
    s = ctx.params.s
    if not 0 < s < 1:
        return CheckResult("balakrishnan_quadrature", "n/a", math.nan, 1e-8, "needs 0 < s < 1")
    q = virial.BalakrishnanQuadrature.for_grid(ctx.grid, s)
    try:
        err = q.check()
    except FracNLSError as exc:
        return CheckResult("balakrishnan_quadrature", "fail", math.nan, 1e-8, str(exc))
    return _res("balakrishnan_quadrature", err, 1e-8, f"{q.count} nodes")


def check_auxiliary_identity(ctx):
    s = ctx.params.s
    if not 0 < s < 1:
        return CheckResult("auxiliary_identity", "n/a", math.nan, 1e-6, "needs 0 < s < 1")
    u = sampling.random_smooth_field(ctx.grid, ctx.rng)
    q = virial.BalakrishnanQuadrature.for_grid(ctx.grid, s)
    val = virial.auxiliary_integral(ctx.grid, u, q)
    ref = s * spectral.hs_seminorm_sq(ctx.grid, u, s)
    return _res("auxiliary_identity", abs(val - ref) / ref, 1e-6)


def check_virial_identity(ctx, delta=1e-4):
    u = ctx.gaussian()
    i = fn.evaluate(ctx.grid, u, ctx.params).I
    rate = virial.virial_rate_fd(ctx.grid, u, ev.step(ctx.grid, u, ctx.params, delta), delta)
    return _res("virial_identity", abs(rate - 8 * i) / abs(8 * i), 1e-3, f"dM/dt={rate:.8g} 8I={8 * i:.8g}")


def check_virial_balakrishnan(ctx, delta=1e-4):
    if not 0 < ctx.params.s < 1:
        return CheckResult("virial_balakrishnan", "n/a", math.nan, 1e-2, "needs 0 < s < 1")
    u = ctx.gaussian()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        w = virial.build_weight(ctx.grid, ctx.cfg.R)
    fd = virial.virial_rate_fd(ctx.grid, u, ev.step(ctx.grid, u, ctx.params, delta), delta, w)
    b = virial.virial_rate_balakrishnan(ctx.grid, u, ctx.params, w)
    return _res("virial_balakrishnan", abs(b - fd) / abs(fd), 1e-2, f"R={ctx.cfg.R} fd={fd:.8g} formula={b:.8g}")


def check_nehari_sampling(ctx, n=20):
    sg = ctx.ground.S_omega_value
    worst = math.inf
    for _ in range(n):
        v = sampling.random_smooth_field(ctx.grid, ctx.rng)
        rep = fn.evaluate(ctx.grid, v, ctx.params)
        lam = fn.nehari_lambda(rep, ctx.params)
        s_val = fn.evaluate(ctx.grid, lam * v, ctx.params).S_omega
        worst = min(worst, s_val - sg)
    return _res("nehari_sampling", -worst, 1e-6, f"min S(lambda0 v) - S(phi) = {worst:.4g} over {n} fields")


def check_omega_scaling(ctx):
    phi = ctx.ground.field
    p = ctx.params
    w = 2.0 * p.omega
    j0 = ctx.ground.report.J
    j1 = fn.weinstein(ctx.grid, fn.omega_scale(ctx.grid, phi, p, w), p.with_omega(w))
    return _res("omega_scaling_J", abs(j1 - j0) / j0, 1e-6, f"omega {p.omega:g} -> {w:g}")


def check_sign_structure(ctx):
    if not ctx.supercritical:
        return CheckResult("sign_structure", "n/a", math.nan, 0.0, "mass-subcritical: d*alpha <= 4s")
    rep = ctx.ground.report
    bad = []
    for lam, sign in ((0.5, 1), (0.9, 1), (1.1, -1), (2.0, -1)):
        r = fn.evaluate(ctx.grid, fn.scale_field(ctx.grid, ctx.ground.field, lam), ctx.params)
        if np.sign(r.I) != sign or not r.S_omega < rep.S_omega:
            bad.append(lam)
    return CheckResult("sign_structure", "fail" if bad else "pass", float(len(bad)), 0.0,
                       f"failing lambdas: {bad}" if bad else "")


def check_key_estimate(ctx, n=20):
    if not ctx.supercritical:
        return CheckResult("key_estimate", "n/a", math.nan, 1e-8, "mass-subcritical: d*alpha <= 4s")
    sg = ctx.ground.S_omega_value
    samples = sampling.unstable_set_samples(ctx.grid, ctx.ground.field, ctx.params, sg, ctx.rng, n)
    if not samples:
        return CheckResult("key_estimate", "fail", math.nan, 1e-8, "no unstable-set samples found")
    worst = max(rep.I - 2 * ctx.params.s * (rep.S_omega - sg) for _, rep in samples)
    return _res("key_estimate", worst, 1e-8, f"{len(samples)} samples")


REGISTRY = {
    "ground_state_residual": check_ground_state,
    "pohozaev": check_pohozaev,
    "ground_state_K_I_zero": check_nehari_virial_zero,
    "gn_saturation": check_gn_saturation,
    "gn_inequality": check_gn_inequality,
    "balakrishnan_quadrature": check_quadrature,
    "auxiliary_identity": check_auxiliary_identity,
    "virial_identity": check_virial_identity,
    "virial_balakrishnan": check_virial_balakrishnan,
    "nehari_sampling": check_nehari_sampling,
    "omega_scaling_J": check_omega_scaling,
    "sign_structure": check_sign_structure,
    "key_estimate": check_key_estimate,
}


def run(cfg, names=None, seed=0):
    """Run the selected checks (all when ``names`` is None); errors count as failures."""
    ctx = Context(cfg, seed)
    names = list(REGISTRY) if names is None else list(names)
    out = []
    for name in names:
        if name not in REGISTRY:
            out.append(CheckResult(name, "fail", math.nan, math.nan, "unknown check"))
            continue
        try:
            out.append(REGISTRY[name](ctx))
        except FracNLSError as exc:
            out.append(CheckResult(name, "fail", math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return ValidationReport(out)


__all__ = ["CheckResult", "ValidationReport", "REGISTRY", "run"]
