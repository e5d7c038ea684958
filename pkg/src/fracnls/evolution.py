"""Strang-split time stepping for ``i u_t - (-Delta)^s u = -|u|^alpha u``.

One step is ``N(dt/2) L(dt) N(dt/2)`` with the exact sub-flows

    L(t): u_hat -> exp(-i |xi|^(2s) t) u_hat
    N(t): u -> u exp(i |u|^alpha t)     (|u| is invariant under N)

Consecutive nonlinear half steps are fused between diagnostics rows.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import _kernels
from . import functionals as fn
from . import spectral
from . import virial
from .errors import ConfigRangeError, DivergedFieldError

log = logging.getLogger(__name__)

COMPLETED = "completed"
BLOWUP = "blowup_detected"
DIVERGED = "diverged"
ABORTED = "aborted"

ROW_FIELDS = ("t", "dt", "mass", "energy", "hs_seminorm_sq", "linf", "I", "K_omega", "S_omega", "M_phiR", "M_full")


@dataclass(frozen=True)
class EvolveConfig:
    dt0: float = 1e-3
    dt_min: float = 1e-9
    t_max: float = 1.0
    blowup_hs_factor: float = 100.0
    blowup_linf: float = 1e6
    cfl_const: float = 0.1
    diag_stride: int = 10
    adaptive: bool = True
    max_steps: int = 10_000_000
    tail_threshold: float = 0.01

    def __post_init__(self):
        for name in ("dt0", "dt_min", "t_max", "blowup_hs_factor", "blowup_linf", "cfl_const"):
            if not getattr(self, name) > 0:
                raise ConfigRangeError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.dt_min < self.dt0:
            raise ConfigRangeError(f"dt_min ({self.dt_min}) must be below dt0 ({self.dt0})")
        if self.diag_stride < 1:
            raise ConfigRangeError(f"diag_stride must be >= 1, got {self.diag_stride}")


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    dt: float
    mass: float
    energy: float
    hs_seminorm_sq: float
    linf: float
    I: float
    K_omega: float
    S_omega: float
    M_phiR: float
    M_full: float

    def values(self):
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass
class RunOutcome:
    status: str
    t_end: float
    steps: int
    final: DiagnosticsRow
    initial: DiagnosticsRow
    trigger: str = ""
    blowup_time_estimate: float = None
    certification: str = ""
    tail_fraction: float = 0.0
    state: np.ndarray = field(default=None, repr=False)
    rows: list = field(default_factory=list, repr=False)

    def summary(self):
        return {
            "status": self.status,
            "t_end": self.t_end,
            "steps": self.steps,
            "trigger": self.trigger,
            "blowup_time_estimate": self.blowup_time_estimate,
            "certification": self.certification,
            "tail_fraction": self.tail_fraction,
            "hs_growth": self.final.hs_seminorm_sq / self.initial.hs_seminorm_sq if self.initial.hs_seminorm_sq else None,
            "initial": asdict(self.initial),
            "final": asdict(self.final),
        }


def _linear_propagator(grid, s, dt):
    key = ("prop", float(s), float(dt))
    cache = grid._cache
    if key not in cache:
        if len([k for k in cache if k[0] == "prop"]) > 8:
            for k in [k for k in cache if k[0] == "prop"]:
                del cache[k]
        cache[key] = np.exp(-1j * dt * grid.symbol(s))
    return cache[key]


def linear_flow(grid, u, s, dt):
    return spectral.ifftn(_linear_propagator(grid, s, dt) * spectral.fftn(u))


def nonlinear_flow(u, alpha, tau):
    """In place ``u <- u exp(i tau |u|^alpha)``."""
    return _kernels.nonlinear_phase(u, alpha, tau)


def step(grid, u, params, dt):
    """One Strang step ``N(dt/2) L(dt) N(dt/2)``. Negative ``dt`` runs backwards."""
    u = np.array(spectral.check_field(grid, u), dtype=complex, order="C", copy=True)
    nonlinear_flow(u, params.alpha, 0.5 * dt)
    u = np.ascontiguousarray(linear_flow(grid, u, params.s, dt))
    nonlinear_flow(u, params.alpha, 0.5 * dt)
    if not _kernels.all_finite(u):
        raise DivergedFieldError("Strang step produced non-finite values")
    return u


def raw_dt(sup_u, params, cfg):
    return cfg.cfl_const / (1.0 + sup_u ** params.alpha)


def adapt_dt(u, params, cfg):
    """``clamp(cfl / (1 + sup|u|^alpha), dt_min, dt0)``."""
    sup_u = _kernels.sup_abs(np.ascontiguousarray(u))
    return min(max(raw_dt(sup_u, params, cfg), cfg.dt_min), cfg.dt0)


def diagnostics(grid, u, params, t, dt, weight=None):
    fh = spectral.fftn(u)
    rep = fn.evaluate(grid, u, params, fhat=fh)
    return DiagnosticsRow(
        t=t,
        dt=dt,
        mass=rep.mass,
        energy=rep.energy,
        hs_seminorm_sq=rep.hs_seminorm_sq,
        linf=_kernels.sup_abs(u),
        I=rep.I,
        K_omega=rep.K_omega,
        S_omega=rep.S_omega,
        M_phiR=virial.virial_action(grid, u, weight) if weight is not None else math.nan,
        M_full=virial.virial_action(grid, u, None),
    )


def evolve(grid, u0, params, cfg, sink=None, weight=None, snapshot=None, snapshot_stride=0):
    """Integrate from ``u0`` until ``t_max`` or a blow-up trigger.

    ``sink(row)`` receives every :class:`DiagnosticsRow` in time order.
    ``snapshot(t, u)`` is called every ``snapshot_stride`` rows when given.
    Triggers: ``hs >= blowup_hs_factor * hs(0)``, ``sup|u| >= blowup_linf``,
    or an unclamped step below ``dt_min``.
    """
    u = np.array(spectral.check_field(grid, u0), dtype=complex, order="C", copy=True)
    spectral.ensure_finite(u, "initial data")
    a, s = params.alpha, params.s
    rows = []

    def emit(row):
        rows.append(row)
        if sink is not None:
            sink(row)
        if snapshot is not None and snapshot_stride and (len(rows) - 1) % snapshot_stride == 0:
            snapshot(row.t, u)

    t = 0.0
    dt = cfg.dt0 if not cfg.adaptive else adapt_dt(u, params, cfg)
    first = diagnostics(grid, u, params, t, dt, weight)
    emit(first)
    hs0 = first.hs_seminorm_sq
    good = u.copy()
    status, trigger, n = COMPLETED, "", 0
    nonlinear_flow(u, a, 0.5 * dt)  # leading half step; u is now half a step ahead in N
    while True:
        if t + dt > cfg.t_max:
            dt_last = cfg.t_max - t
            # undo the surplus of the pending half step
            nonlinear_flow(u, a, 0.5 * (dt_last - dt))
            dt = dt_last
        u = linear_flow(grid, u, s, dt)
        t += dt
        n += 1
        sup_u = _kernels.sup_abs(u)
        if not math.isfinite(sup_u):
            status, trigger = DIVERGED, "non-finite values"
            u = good
            break
        if cfg.adaptive:
            r = raw_dt(sup_u, params, cfg)
            dt_next = min(max(r, cfg.dt_min), cfg.dt0)
        else:
            r, dt_next = cfg.dt0, cfg.dt0
        done = t >= cfg.t_max * (1 - 1e-15) or n >= cfg.max_steps
        hit = sup_u >= cfg.blowup_linf or r < cfg.dt_min
        if done or hit or n % cfg.diag_stride == 0:
            nonlinear_flow(u, a, 0.5 * dt)
            row = diagnostics(grid, u, params, t, dt, weight)
            emit(row)
            good = u.copy()
            if row.hs_seminorm_sq >= cfg.blowup_hs_factor * hs0:
                status, trigger = BLOWUP, f"hs_seminorm_sq >= {cfg.blowup_hs_factor:g} x initial"
            elif sup_u >= cfg.blowup_linf:
                status, trigger = BLOWUP, f"linf >= {cfg.blowup_linf:g}"
            elif r < cfg.dt_min:
                status, trigger = BLOWUP, f"step {r:.3g} below dt_min {cfg.dt_min:g}"
            elif done:
                status = COMPLETED if t >= cfg.t_max * (1 - 1e-15) else ABORTED
                trigger = "" if status == COMPLETED else "max_steps reached"
            if status != COMPLETED or done:
                break
            nonlinear_flow(u, a, 0.5 * dt_next)
        else:
            nonlinear_flow(u, a, 0.5 * (dt + dt_next))
        dt = dt_next

    final = rows[-1]
    tail = spectral.spectral_tail_fraction(grid, u)
    out = RunOutcome(
        status=status,
        t_end=final.t,
        steps=n,
        final=final,
        initial=first,
        trigger=trigger,
        tail_fraction=tail,
        state=u,
        rows=rows,
    )
    if status == BLOWUP:
        out.blowup_time_estimate = final.t
        out.certification = "under-resolved growth" if tail > cfg.tail_threshold else "resolved growth"
    log.info("run ended: %s at t=%.6g after %d steps %s", status, final.t, n, trigger)
    return out
