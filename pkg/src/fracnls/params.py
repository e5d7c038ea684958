"""Model parameters (d, s, alpha, omega) and their admissible ranges."""
import math
from dataclasses import dataclass

from .errors import DomainError


def alpha_star(d, s):
    """Energy-critical power: ``4s/(d-2s)`` if ``d > 2s``, else infinity."""
    return 4.0 * s / (d - 2.0 * s) if d > 2.0 * s else math.inf


@dataclass(frozen=True)
class ModelParams:
    """Dimension, fractional order, nonlinearity power and frequency.

    ``s = 1`` is admitted so the classical NLS soliton can serve as an
    oracle; everything else requires ``0 < s < 1``.
    """

    d: int
    s: float
    alpha: float
    omega: float = 1.0

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"d must be 1, 2 or 3, got {self.d}")
        if not 0.0 < self.s <= 1.0:
            raise DomainError(f"s must satisfy 0 < s <= 1, got {self.s}")
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.alpha < self.alpha_star:
            raise DomainError(
                f"alpha={self.alpha} violates alpha < alpha* = 4s/(d-2s) = "
                f"{self.alpha_star:.6g} (d={self.d}, s={self.s})"
            )
        if not self.omega > 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")

    @property
    def alpha_star(self):
        return alpha_star(self.d, self.s)

    @property
    def mass_supercritical(self):
        """``d*alpha > 4s``."""
        return self.d * self.alpha > 4.0 * self.s

    def theorem_violations(self):
        """Reasons the parameters fall outside the strong-instability regime.

        The regime is ``d >= 2``, ``d/(2d-1) <= s < 1``,
        ``4s/d < alpha < 4s/(d-2s)`` and ``alpha < 4s``. Empty list means inside.
        """
        d, s, a = self.d, self.s, self.alpha
        out = []
        if d < 2:
            out.append(f"need d >= 2, got d={d}")
        if not (d / (2.0 * d - 1.0) <= s < 1.0):
            out.append(f"need d/(2d-1) = {d / (2.0 * d - 1.0):.6g} <= s < 1, got s={s}")
        if not a > 4.0 * s / d:
            out.append(f"need alpha > 4s/d = {4.0 * s / d:.6g}, got alpha={a}")
        if not a < self.alpha_star:
            out.append(f"need alpha < 4s/(d-2s) = {self.alpha_star:.6g}, got alpha={a}")
        if not a < 4.0 * s:
            out.append(f"need alpha < 4s = {4.0 * s:.6g}, got alpha={a}")
        return out

    @property
    def in_theorem_regime(self):
        return not self.theorem_violations()

    @property
    def pohozaev_constants(self):
        """``(c1, c2)`` with ``omega*mass = c1*hs = c2*lp`` at a ground state."""
        d, s, a = self.d, self.s, self.alpha
        num = 4.0 * s - (d - 2.0 * s) * a
        return num / (d * a), num / (2.0 * s * (a + 2.0))

    def with_omega(self, omega):
        return ModelParams(self.d, self.s, self.alpha, omega)
