"""Spectral solver and toolkit for the focusing fractional NLS

    i u_t - (-Delta)^s u = -|u|^alpha u

on a periodic box: ground states, functionals, Strang-split evolution,
virial diagnostics and blow-up experiments.
"""
from ._kernels import backend
from .errors import (
    ConfigError,
    DivergedFieldError,
    DomainError,
    FracNLSError,
    NonConvergenceError,
    PreconditionError,
    RegimeError,
    TruncationWarning,
)
from .evolution import DiagnosticsRow, EvolveConfig, RunOutcome, adapt_dt, evolve, step
from .functionals import (
    FunctionalReport,
    PohozaevResidual,
    evaluate,
    in_unstable_set,
    omega_scale,
    pohozaev_residual,
    rescale_to_nehari,
    rescale_to_virial_null,
    scale_field,
    sharp_gn_constant,
)
from .ground_state import GroundStateResult, scaled_initial_data, solve, solve_via_omega_scaling
from .params import ModelParams, alpha_star
from .spectral import EvenSpace, GridSpec, fractional_laplacian, gradient, inverse_transform, norms, transform

__version__ = "0.1.0"
