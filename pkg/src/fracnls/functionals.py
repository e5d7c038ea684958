"""Scalar functionals, scaling maps and manifold rescalings.

For a field v with mass M = ||v||^2, kinetic part T = ||v||^2_{H^s dot} and
potential part P = ||v||^{alpha+2}_{L^{alpha+2}}:

    E   = T/2 - P/(alpha+2)
    S_w = E + w M / 2
    H_w = T + w M,    K_w = H_w - P
    I   = s T - d alpha / (2 (alpha+2)) P
    J   = T^(d alpha/(4s)) M^((alpha+2 - d alpha/(2s))/2) / P
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import spectral
from .errors import DomainError, RegimeError


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    hs_seminorm_sq: float
    lp_alpha2_pow: float
    energy: float
    S_omega: float
    K_omega: float
    h_omega: float
    I: float
    J: float  # NaN for the zero field

    def to_dict(self):
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


@dataclass(frozen=True)
class PohozaevResidual:
    r1: float
    r2: float

    @property
    def max(self):
        return max(self.r1, self.r2)


def weinstein_value(params, mass, hs, lp):
    d, s, a = params.d, params.s, params.alpha
    if lp == 0:
        raise DomainError("the Weinstein functional is undefined at v = 0")
    return hs ** (d * a / (4 * s)) * mass ** ((a + 2 - d * a / (2 * s)) / 2) / lp


def report_from_norms(params, mass, hs, lp):
    d, s, a, w = params.d, params.s, params.alpha, params.omega
    energy = 0.5 * hs - lp / (a + 2)
    h = hs + w * mass
    J = weinstein_value(params, mass, hs, lp) if lp > 0 else math.nan
    return FunctionalReport(
        mass=mass,
        hs_seminorm_sq=hs,
        lp_alpha2_pow=lp,
        energy=energy,
        S_omega=energy + 0.5 * w * mass,
        K_omega=h - lp,
        h_omega=h,
        I=s * hs - d * a / (2 * (a + 2)) * lp,
        J=J,
    )


def evaluate(grid, v, params, fhat=None):
    """All functionals of ``v``. Raises DivergedFieldError on non-finite input."""
    n = spectral.norms(grid, v, params, fhat)
    return report_from_norms(params, n.mass, n.hs_seminorm_sq, n.lp_alpha2_pow)


def weinstein(grid, v, params):
    n = spectral.norms(grid, v, params)
    return weinstein_value(params, n.mass, n.hs_seminorm_sq, n.lp_alpha2_pow)


def pohozaev_residual(report, params):
    c1, c2 = params.pohozaev_constants
    wm = params.omega * report.mass
    if wm == 0:
        raise DomainError("Pohozaev residuals are undefined for the zero field")
    return PohozaevResidual(
        r1=abs(wm - c1 * report.hs_seminorm_sq) / wm,
        r2=abs(wm - c2 * report.lp_alpha2_pow) / wm,
    )


def sharp_gn_constant(params, q_mass):
    """Optimal Gagliardo-Nirenberg constant from the ground-state mass ``||Q||^2``."""
    d, s, a = params.d, params.s, params.alpha
    if not a < params.alpha_star:
        raise DomainError(f"alpha={a} must be below alpha* = 4s/(d-2s) = {params.alpha_star:.6g}")
    if not q_mass > 0:
        raise DomainError("ground-state mass must be positive")
    b = 2 * s * (a + 2)
    return ((b - d * a) / (d * a)) ** (d * a / (4 * s)) * b / (b - d * a) * q_mass ** (-a / 2)


def gn_ratio(grid, v, params, c_opt):
    """``P / (C_opt T^(d alpha/4s) M^(...))``; at most 1 by the sharp GN inequality."""
    n = spectral.norms(grid, v, params)
    return 1.0 / (c_opt * weinstein_value(params, n.mass, n.hs_seminorm_sq, n.lp_alpha2_pow))


def scale_field(grid, v, lam):
    """Mass-preserving dilation ``lam^(d/2) v(lam x)``, resampled spectrally on the same box."""
    if not lam > 0:
        raise DomainError(f"scaling factor must be positive, got {lam}")
    if lam == 1.0:
        return np.array(spectral.check_field(grid, v), copy=True)
    out = lam ** (grid.d / 2.0) * spectral.dilate(grid, v, lam)
    if lam < 1.0:
        spectral.check_decay(grid, out, what="dilated field")
    return out


def omega_scale(grid, phi, params, omega_new):
    """Map a solution at frequency ``params.omega`` to ``omega_new``.

    ``phi_w(x) = w^(1/alpha) phi(w^(1/(2s)) x)`` with ``w`` the frequency ratio.
    """
    if not omega_new > 0:
        raise DomainError(f"omega must be positive, got {omega_new}")
    w = omega_new / params.omega
    if w == 1.0:
        return np.array(phi, copy=True)
    return w ** (1.0 / params.alpha) * spectral.dilate(grid, phi, w ** (1.0 / (2 * params.s)))


def nehari_lambda(report, params):
    if report.lp_alpha2_pow == 0:
        raise DomainError("Nehari rescaling is undefined for v = 0")
    return (report.h_omega / report.lp_alpha2_pow) ** (1.0 / params.alpha)


def rescale_to_nehari(grid, v, params):
    """Amplitude ``lambda0`` with ``K_w(lambda0 v) = 0``; returns ``(lambda0, lambda0 * v)``."""
    lam = nehari_lambda(evaluate(grid, v, params), params)
    return lam, lam * np.asarray(v)


def virial_null_lambda(report, params):
    d, s, a = params.d, params.s, params.alpha
    if not d * a > 4 * s:
        raise RegimeError(f"virial-null rescaling needs d*alpha > 4s (mass-supercritical), got d*alpha={d * a}, 4s={4 * s}")
    if report.lp_alpha2_pow == 0:
        raise DomainError("virial-null rescaling is undefined for v = 0")
    coef = d * a / (2 * s * (a + 2))
    return (report.hs_seminorm_sq / (coef * report.lp_alpha2_pow)) ** (2.0 / (d * a - 4 * s))


def rescale_to_virial_null(grid, v, params):
    """Dilation ``lambda0`` with ``I(v^lambda0) = 0``; returns ``(lambda0, v^lambda0)``."""
    lam = virial_null_lambda(evaluate(grid, v, params), params)
    return lam, scale_field(grid, v, lam)


def in_unstable_set(report, s_ground, rtol=1e-10):
    """Membership in ``{S_w < S_w(phi_w), I < 0}``.

    The action inequality is strict up to ``rtol`` so that ``phi`` itself,
    recomputed with roundoff, is never counted as a member.
    """
    margin = rtol * abs(s_ground)
    return report.mass > 0 and report.S_omega < s_ground - margin and report.I < 0


def scaled_report(report, params, lam):
    """Functionals of ``v^lam`` from those of ``v`` via the exact scaling laws."""
    d, s, a = params.d, params.s, params.alpha
    return report_from_norms(
        params,
        report.mass,
        lam ** (2 * s) * report.hs_seminorm_sq,
        lam ** (d * a / 2) * report.lp_alpha2_pow,
    )


def hs_norm_sq(report):
    """Inhomogeneous ``||v||^2_{H^s} = mass + T``."""
    return report.mass + report.hs_seminorm_sq


__all__ = [
    "FunctionalReport",
    "PohozaevResidual",
    "evaluate",
    "weinstein",
    "pohozaev_residual",
    "sharp_gn_constant",
    "gn_ratio",
    "scale_field",
    "omega_scale",
    "rescale_to_nehari",
    "rescale_to_virial_null",
    "in_unstable_set",
    "scaled_report",
]
