"""Exception and warning types shared across the package."""


class FracNLSError(Exception):
    """Base class for all package errors."""


class DomainError(FracNLSError, ValueError):
    """A parameter lies outside the admissible range of an operation."""


class RegimeError(DomainError):
    """The operation needs a regime (e.g. mass-supercritical) the parameters miss."""


class DivergedFieldError(FracNLSError, FloatingPointError):
    """A field contains NaN or Inf entries."""


class NonConvergenceError(FracNLSError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class QuadratureError(FracNLSError):
    """A quadrature rule failed its self-check."""


class PreconditionError(FracNLSError):
    """An experiment precondition (e.g. membership in the unstable set) failed."""


class ConfigError(FracNLSError):
    """Configuration problem. ``code`` distinguishes the failure kind."""

    code = "config_error"


class MissingConfigError(ConfigError):
    code = "missing_file"


class ConfigParseError(ConfigError):
    code = "parse_error"


class UnknownKeyError(ConfigError):
    code = "unknown_key"


class ConfigRangeError(ConfigError):
    code = "out_of_range"


class TruncationWarning(UserWarning):
    """A field is not decayed at the edge of the periodic box."""


class FieldShapeError(FracNLSError, ValueError):
    """A field's shape does not match its grid."""
