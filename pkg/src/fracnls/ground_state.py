"""Ground states of ``(-Delta)^s phi + omega phi - |phi|^alpha phi = 0``.

The solver is a Petviashvili iteration on fields that are even in every
coordinate, so transforms reduce to type-I DCTs on the ``[0, L]^d`` corner
of the box. The positive ground state is radial, hence even, and the
restriction also removes the translation modes that otherwise let the
iterate drift.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import functionals as fn
from . import spectral
from .errors import DomainError, NonConvergenceError
from .params import ModelParams

log = logging.getLogger(__name__)


def even_norms(space, half, params):
    """``(mass, hs, lp)`` of an even field stored on the half grid."""
    grid = space.grid
    c = space.forward(half)
    hd = grid.cell_volume
    mass = hd * space.sum(half * half)
    lp = hd * space.sum(np.abs(half) ** (params.alpha + 2))
    hs = hd / grid.N ** grid.d * space.coeff_sum(space.k2 ** params.s * c * c)
    return mass, hs, lp


def even_residual(space, half, params, coeffs=None):
    """Sup of the equation residual relative to ``sup |phi|^(alpha+1)``."""
    c = space.forward(half) if coeffs is None else coeffs
    lin = space.backward((space.k2 ** params.s + params.omega) * c)
    nl = np.abs(half) ** params.alpha * half
    peak = np.abs(half).max() ** (params.alpha + 1)
    return float(np.abs(lin - nl).max() / peak) if peak > 0 else float("inf")


def equation_residual(grid, phi, params):
    """Sup of ``(-Delta)^s phi + omega phi - |phi|^alpha phi`` over ``sup |phi|^(alpha+1)``."""
    phi = spectral.check_field(grid, phi)
    r = spectral.fractional_laplacian(grid, phi, params.s) + params.omega * phi - np.abs(phi) ** params.alpha * phi
    peak = np.abs(phi).max() ** (params.alpha + 1)
    return float(np.abs(r).max() / peak)


@dataclass
class GroundStateResult:
    """Converged ground state. ``half`` holds the samples on ``[0, L]^d``."""

    params: ModelParams
    grid: spectral.GridSpec
    half: np.ndarray
    iterations: int
    final_residual: float
    report: fn.FunctionalReport
    pohozaev: fn.PohozaevResidual
    residual_history: list = field(default_factory=list, repr=False)

    @property
    def S_omega_value(self):
        return self.report.S_omega

    @cached_property
    def field(self):
        """The ground state on the full periodic grid (real, peak at the origin)."""
        return spectral.EvenSpace(self.grid).to_full(self.half)

    def sidecar(self):
        return {
            "params": {"d": self.params.d, "s": self.params.s, "alpha": self.params.alpha, "omega": self.params.omega},
            "grid": {"L": self.grid.L, "N": self.grid.N},
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "pohozaev": {"r1": self.pohozaev.r1, "r2": self.pohozaev.r2},
            "S_omega_value": self.S_omega_value,
            "functionals": self.report.to_dict(),
        }


def default_guess(space, params, amplitude=None, width=None):
    w = params.omega
    A = 2.0 * w ** (1.0 / params.alpha) if amplitude is None else amplitude
    sig = w ** (-1.0 / (2.0 * params.s)) if width is None else width
    return A * np.exp(-space.r2 / (2.0 * sig * sig))


def _result(space, params, half, iterations, history):
    mass, hs, lp = even_norms(space, half, params)
    rep = fn.report_from_norms(params, mass, hs, lp)
    return GroundStateResult(
        params=params,
        grid=space.grid,
        half=half,
        iterations=iterations,
        final_residual=even_residual(space, half, params),
        report=rep,
        pohozaev=fn.pohozaev_residual(rep, params),
        residual_history=history,
    )


def solve(params, grid, seed=None, tol=1e-10, res_tol=1e-8, max_iter=2000, stall=200, check_box=True):
    """Petviashvili iteration for the positive radial ground state.

    ``seed`` is ``None`` (Gaussian with default amplitude and width), a dict
    with ``amplitude`` and/or ``width``, or an even array on the full grid.
    Iteration stops once ``|m - 1| <= tol`` and the relative equation
    residual is ``<= res_tol``.
    """
    if params.d != grid.d:
        raise DomainError(f"params.d={params.d} does not match grid.d={grid.d}")
    space = spectral.EvenSpace(grid)
    if seed is None or isinstance(seed, dict):
        u = default_guess(space, params, **(seed or {}))
    else:
        u = np.real(space.from_full(spectral.check_field(grid, seed))).astype(float)

    a = params.alpha
    gamma = (a + 1.0) / a
    lop = space.k2 ** params.s + params.omega
    W = space.weights
    history = []
    best, best_it = np.inf, 0
    for it in range(max_iter + 1):
        c = space.forward(u)
        nl = np.abs(u) ** a * u
        cn = space.forward(nl)
        m = np.sum(W * lop * c * c) / np.sum(W * c * cn)
        res = float(np.abs(space.backward(lop * c) - nl).max() / np.abs(u).max() ** (a + 1))
        history.append(res)
        if not np.isfinite(res) or not np.isfinite(m):
            raise NonConvergenceError("Petviashvili iteration produced non-finite values", residual=res, iterations=it)
        if abs(m - 1.0) <= tol and res <= res_tol:
            break
        if res < best:
            best, best_it = res, it
        elif it - best_it > stall:
            raise NonConvergenceError(
                f"Petviashvili iteration stagnated at residual {best:.3e}", residual=best, iterations=it
            )
        if it == max_iter:
            raise NonConvergenceError(
                f"no convergence in {max_iter} iterations (|m-1|={abs(m - 1):.2e}, residual={res:.2e})",
                residual=res,
                iterations=it,
            )
        u = space.backward(m ** gamma * cn / lop)
    if u[(0,) * grid.d] < 0:
        u = -u
    log.debug("ground state converged in %d iterations, residual %.2e", it, res)
    out = _result(space, params, u, it, history)
    if check_box:
        spectral.warn_if_truncated(space.boundary_ratio(u), what="ground state")
    return out


def box_for_omega(grid, params, omega):
    """Box with the same ``N`` and half-length scaled by the ground-state width ``omega^(-1/(2s))``."""
    return spectral.GridSpec(grid.d, grid.L * (omega / params.omega) ** (-1.0 / (2.0 * params.s)), grid.N)


def solve_via_omega_scaling(params, grid, base):
    """Ground state at ``params.omega`` from a converged ``base`` at another frequency.

    The field is resampled onto ``grid``; residuals and functionals are
    recomputed from the new samples.
    """
    bp = base.params
    if (bp.d, bp.s, bp.alpha) != (params.d, params.s, params.alpha):
        raise DomainError("base ground state has different (d, s, alpha)")
    if grid.d != params.d:
        raise DomainError("grid dimension does not match params")
    space = spectral.EvenSpace(grid)
    w = params.omega / bp.omega
    if grid == base.grid:
        full = fn.omega_scale(grid, base.field, bp, params.omega)
        half = np.real(space.from_full(full))
    elif np.isclose(grid.L, base.grid.L * w ** (-1.0 / (2.0 * params.s)), rtol=1e-14) and grid.N == base.grid.N:
        # width-scaled box: samples map onto samples
        half = w ** (1.0 / params.alpha) * base.half
    else:
        raise DomainError("grid must equal the base grid or its width-scaled box (see box_for_omega)")
    return _result(space, params, half, 0, [])


def scaled_initial_data(gs, lam):
    """``phi^lam = lam^(d/2) phi(lam x)`` on the ground-state grid."""
    return fn.scale_field(gs.grid, gs.field, lam)


def strang_standing_wave(gs, dt, tol=1e-12, max_iter=30):
    """Standing wave of the Strang map with step ``dt``.

    Solves ``exp(-i omega dt) S_dt(u) = u`` by Newton-Krylov, starting from
    the ground state, with the residual preconditioned by
    ``((-Delta)^s + omega)^(-1)``. The result differs from ``gs.field`` by
    O(dt^2) and is an exact fixed point of the discrete flow, so an
    evolution started from it with fixed step ``dt`` does not pick up the
    splitting error that otherwise seeds the unstable mode.
    Returns the full complex field.
    """
    from scipy.optimize import NoConvergence, newton_krylov

    from . import _kernels

    p, space = gs.params, spectral.EvenSpace(gs.grid)
    sym = space.k2 ** p.s
    prop = np.exp(-1j * dt * sym)
    pre = 1.0 / (sym + p.omega)
    shape, n = gs.half.shape, gs.half.size

    def apply(u, m):
        return space.backward(m * space.forward(u.real)) + 1j * space.backward(m * space.forward(u.imag))

    def strang(u):
        u = np.array(u, dtype=complex, order="C")
        _kernels.nonlinear_phase(u, p.alpha, 0.5 * dt)
        u = np.ascontiguousarray(apply(u, prop))
        _kernels.nonlinear_phase(u, p.alpha, 0.5 * dt)
        return u

    def resid(x):
        u = (x[:n] + 1j * x[n:]).reshape(shape)
        d = apply(1j * (np.exp(-1j * p.omega * dt) * strang(u) - u) / dt, pre)
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    x0 = np.concatenate([np.asarray(gs.half, dtype=float).ravel(), np.zeros(n)])
    try:
        x = newton_krylov(resid, x0, f_tol=tol, maxiter=max_iter, method="lgmres")
    except NoConvergence as exc:
        r = float(np.abs(resid(exc.args[0])).max())
        raise NonConvergenceError(f"Strang standing wave did not converge (residual {r:.3e})", r, max_iter) from None
    return space.to_full((x[:n] + 1j * x[n:]).reshape(shape))
