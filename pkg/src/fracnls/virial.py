"""Virial actions, the localized weight family and the Balakrishnan representation.

The virial action of a weight ``phi`` is

    M_phi(u) = 2 * integral grad(phi) . Im(conj(u) grad(u)) dx,

and with ``phi = |x|^2`` its time derivative along the flow is ``8 I(u)``.
For general ``phi`` the rate is written through the resolvent fields

    u_m = c_s (-Delta + m)^(-1) u,    c_s = sqrt(sin(pi s) / pi),

integrated against ``m^s dm`` over ``(0, inf)``.
"""
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from . import spectral
from .errors import DomainError, QuadratureError, TruncationWarning

# --- radial weight profile ------------------------------------------------


def _septic_step():
    """``1 - S(t)`` with ``S`` the C^3 smoothstep ``35t^4 - 84t^5 + 70t^6 - 20t^7``."""
    return 1 - Polynomial([0, 0, 0, 0, 35, -84, 70, -20])


@dataclass(frozen=True)
class RadialProfile:
    """Unit profile ``phi``: ``r^2`` on ``[0, 1]``, constant on ``[10, inf)``.

    Between 1 and 10, ``phi'(r) = 2 r psi((r - 1)/9)`` with ``psi`` descending
    from 1 to 0 with three vanishing derivatives at each end, so ``phi`` is C^4
    and ``phi'' <= 2psi <= 2``.
    """

    @cached_property
    def _polys(self):
        t = Polynomial([-1 / 9, 1 / 9])
        dphi = Polynomial([0, 2]) * _septic_step()(t)
        phi = dphi.integ(lbnd=1, k=1)
        return [phi, dphi, dphi.deriv(1), dphi.deriv(2), dphi.deriv(3)]

    @cached_property
    def plateau(self):
        return float(self._polys[0](10.0))

    def derivatives(self, r):
        """``phi, phi', phi'', phi''', phi''''`` evaluated at ``r >= 0``."""
        r = np.asarray(r, dtype=float)
        inner = r <= 1.0
        outer = r >= 10.0
        mid = ~(inner | outer)
        rc = np.clip(r, 1.0, 10.0)
        out = [np.where(mid, p(rc), 0.0) for p in self._polys]
        out[0] = np.where(inner, r * r, np.where(outer, self.plateau, out[0]))
        out[1] = np.where(inner, 2 * r, out[1])
        out[2] = np.where(inner, 2.0, out[2])
        return out


PROFILE = RadialProfile()


@dataclass
class VirialWeight:
    """``phi_R(x) = R^2 phi(|x|/R)`` and the derivatives the virial calculus needs."""

    R: float
    d: int
    phi: np.ndarray
    dphi: np.ndarray  # radial derivative phi_R'(r)
    d2phi: np.ndarray  # phi_R''(r)
    grad: tuple
    hess: dict  # (j, k) with j <= k -> d^2 phi_R / dx_j dx_k
    lap: np.ndarray
    bilap: np.ndarray

    def hessian(self, j, k):
        return self.hess[(min(j, k), max(j, k))]


def radial_derivatives(r, R):
    """``phi_R`` and its first four radial derivatives at radii ``r``."""
    p0, p1, p2, p3, p4 = PROFILE.derivatives(np.asarray(r) / R)
    return R * R * p0, R * p1, p2, p3 / R, p4 / (R * R)


def build_weight(grid, R):
    """Tabulate ``phi_R`` on the grid. Inside ``|x| <= R`` values are exact (``|x|^2``)."""
    if not R > 1:
        raise DomainError(f"virial weight scale must satisfy R > 1, got {R}")
    if 10 * R > grid.L:
        warnings.warn(
            f"10R = {10 * R:g} exceeds the box half-length L = {grid.L:g}; phi_R is not constant near the boundary",
            TruncationWarning,
            stacklevel=2,
        )
    d = grid.d
    r = grid.radius
    f0, f1, f2, f3, f4 = radial_derivatives(r, R)
    inside = r <= R
    rs = np.where(inside, 1.0, r)
    xs = [np.broadcast_to(c, grid.shape) for c in grid.coords]
    g = f1 / rs
    grad = tuple(np.where(inside, 2.0 * x, g * x) for x in xs)
    hess = {}
    for j in range(d):
        for k in range(j, d):
            xx = xs[j] * xs[k] / (rs * rs)
            val = f2 * xx + g * ((1.0 if j == k else 0.0) - xx)
            hess[(j, k)] = np.where(inside, 2.0 if j == k else 0.0, val)
    lap = np.where(inside, 2.0 * d, f2 + (d - 1) * g)
    bilap = f4 + 2 * (d - 1) * f3 / rs + (d - 1) * (d - 3) * (f2 / rs ** 2 - f1 / rs ** 3)
    bilap = np.where(inside, 0.0, bilap)
    return VirialWeight(R=R, d=d, phi=f0, dphi=f1, d2phi=f2, grad=grad, hess=hess, lap=lap, bilap=bilap)


# --- virial actions -------------------------------------------------------


def current_density(grid, u):
    """``Im(conj(u) grad u)`` per axis."""
    u = spectral.check_field(grid, u)
    return [np.imag(np.conj(u) * g) for g in spectral.gradient(grid, u)]


def virial_action(grid, u, weight=None):
    """``M_phi(u)``; ``weight=None`` means ``phi = |x|^2`` (``grad phi = 2x``)."""
    J = current_density(grid, u)
    if weight is None:
        grads = [2.0 * c for c in grid.coords]
    else:
        grads = weight.grad
    acc = 0.0
    for gj, jj in zip(grads, J):
        acc += float(np.sum(gj * jj))
    return 2.0 * acc * grid.cell_volume


def virial_rate_fd(grid, u_t, u_next, delta, weight=None):
    """Forward difference ``(M(u(t + delta)) - M(u(t))) / delta``."""
    return (virial_action(grid, u_next, weight) - virial_action(grid, u_t, weight)) / delta


# --- Balakrishnan representation ------------------------------------------


def c_s(s):
    return math.sqrt(math.sin(math.pi * s) / math.pi)


def balakrishnan_field(grid, u, m, s):
    """``u_m = c_s (-Delta + m)^(-1) u``."""
    if not m > 0:
        raise DomainError(f"resolvent parameter must be positive, got {m}")
    return spectral.fourier_multiply(grid, u, c_s(s) / (grid.k2 + m))


class BalakrishnanQuadrature:
    """Nodes and weights for ``integral_{m0}^{m1} f(m) dm`` plus analytic end pieces.

    The rule is the trapezoid rule in ``y = ln m`` (geometric nodes), which is
    spectrally accurate for integrands like ``m^s / (q + m)^2`` that decay
    exponentially in ``y`` at both ends. The window covers
    ``[q_lo e^-pad, q_hi e^pad]``. Beyond it the integrand is replaced by
    the leading terms of its small- and large-``m`` expansions, which are
    pure powers of ``m`` (exponentials in ``y``), and the remaining nodes of
    the infinite trapezoid sum are added as geometric series.
    """

    def __init__(self, s, q_lo=0.25, q_hi=4.0, step=0.75, pad=10.0):
        if not 0 < s < 1:
            raise DomainError(f"Balakrishnan quadrature needs 0 < s < 1, got {s}")
        q_lo, q_hi = min(q_lo, 0.25), max(q_hi, 4.0)
        self.s = s
        self.step = step
        self.pad = pad
        y0, y1 = math.log(q_lo) - pad, math.log(q_hi) + pad
        n = int(math.ceil((y1 - y0) / step))
        y = np.linspace(y0, y1, n + 1)
        hy = (y1 - y0) / n
        self.hy = hy
        self.nodes = np.exp(y)
        self.weights = hy * self.nodes
        self.m0 = float(self.nodes[0])
        self.m1 = float(self.nodes[-1])

    @classmethod
    def for_grid(cls, grid, s, **kw):
        q_lo = (math.pi / grid.L) ** 2
        q_hi = grid.d * grid.nyquist ** 2
        return cls(s, q_lo, q_hi, **kw)

    @property
    def count(self):
        return self.nodes.size

    @property
    def cs2(self):
        return math.sin(math.pi * self.s) / math.pi

    def tail(self, e):
        """Trapezoid nodes past the window for ``integral m^(e-1) dm``.

        ``e < 0`` gives the part above the last node, ``e > 0`` the part
        below the first one.
        """
        base = self.m1 if e < 0 else self.m0
        r = math.exp(-abs(e) * self.hy)
        return self.hy * base ** e * r / (1.0 - r)

    def integrate(self, q):
        """``integral_0^inf (sin(pi s)/pi) m^s / (q + m)^2 dm``; exact value ``s q^(s-1)``."""
        q = np.asarray(q, dtype=float)[..., None]
        s, m = self.s, self.nodes
        body = np.sum(self.weights * m ** s / (q + m) ** 2, axis=-1)
        q = q[..., 0]
        T = self.tail
        right = T(s - 1) - 2 * q * T(s - 2) + 3 * q * q * T(s - 3)
        left = T(s + 1) / q ** 2 - 2 * T(s + 2) / q ** 3
        return self.cs2 * (body + left + right)

    def check(self, qs=(0.25, 1.0, 4.0), tol=1e-8):
        """Raise :class:`QuadratureError` unless the scalar identity holds at ``qs``."""
        qs = np.asarray(qs, dtype=float)
        exact = self.s * qs ** (self.s - 1)
        err = np.abs(self.integrate(qs) - exact) / exact
        if not np.all(err <= tol):
            raise QuadratureError(f"Balakrishnan quadrature misses the scalar identity: max rel. error {err.max():.2e} > {tol:.0e}")
        return float(err.max())


def auxiliary_integral(grid, u, quad):
    """``integral m^s integral |grad u_m|^2 dx dm``; equals ``s ||u||^2_{H^s dot}``.

    Each node is evaluated in Fourier space by Parseval.
    """
    u = spectral.check_field(grid, u)
    c = spectral.transform(grid, u)
    p = np.abs(c) ** 2
    q = grid.k2
    s = quad.s
    dxi = grid.dxi ** grid.d
    total = 0.0
    for m, w in zip(quad.nodes, quad.weights):
        total += w * m ** s * float(np.sum(q * p / (q + m) ** 2))
    T = quad.tail
    total += float(np.sum(p * q * (T(s - 1) - 2 * q * T(s - 2))))
    qn = np.where(q > 0, q, 1.0)
    left = np.where(q > 0, T(s + 1) / qn - 2 * T(s + 2) / (qn * qn), 0.0)
    total += float(np.sum(p * left))
    return quad.cs2 * total * dxi


class _Bilinear:
    """``B(f, g) = -int bilap f* g + 4 sum_jk int hess_jk d_j f* d_k g`` for one weight."""

    def __init__(self, grid, weight):
        self.grid = grid
        self.w = weight

    def grads(self, fh):
        out = []
        for ax, k in enumerate(self.grid.wavenumbers):
            out.append(spectral.ifftn(1j * k * fh))
        return out

    def b0(self, f, g):
        return -float(np.real(np.sum(self.w.bilap * np.conj(f) * g)))

    def b(self, fh, gh, f=None, g=None):
        d = self.grid.d
        f = spectral.ifftn(fh) if f is None else f
        g = spectral.ifftn(gh) if g is None else g
        df = self.grads(fh)
        dg = df if gh is fh else self.grads(gh)
        acc = self.b0(f, g)
        for j in range(d):
            for k in range(d):
                acc += 4.0 * float(np.real(np.sum(self.w.hessian(j, k) * np.conj(df[j]) * dg[k])))
        return acc


def virial_rate_balakrishnan(grid, u, params, weight=None, quad=None, check=True):
    """Right-hand side of the time-evolution law for ``M_phi`` at the state ``u``.

    ``weight=None`` means ``phi = |x|^2``. Validation-grade: the cost is a few
    transforms per quadrature node.
    """
    u = spectral.check_field(grid, u).astype(complex)
    s, a = params.s, params.alpha
    if quad is None:
        quad = BalakrishnanQuadrature.for_grid(grid, s)
    if check:
        quad.check()
    hd = grid.cell_volume
    absu = np.abs(u) ** (a + 2)
    if weight is None:
        kinetic = 8.0 * auxiliary_integral(grid, u, quad)
        pot = 2.0 * grid.d * float(np.sum(absu)) * hd
        return kinetic - 2.0 * a / (a + 2.0) * pot

    B = _Bilinear(grid, weight)
    uh = spectral.fftn(u)
    u0 = uh.flat[0] / u.size  # mean value
    q = grid.k2
    wh = uh.copy()
    wh.flat[0] = 0.0
    cs2 = quad.cs2
    total = 0.0
    for m, wt in zip(quad.nodes, quad.weights):
        bh = wh / (q + m)
        bm = spectral.ifftn(bh)
        # zero-mean part squared plus twice the cross term with the constant u0/m
        val = B.b(bh, bh, bm, bm) + 2.0 * B.b0(np.full(1, u0 / m), bm)
        total += wt * m ** s * val
    # large-m end: u_m ~ c_s (u/m - (-Delta)u/m^2)
    c0 = np.full(1, u0)
    w = spectral.ifftn(wh)
    lap_h = q * wh
    lap = spectral.ifftn(lap_h)
    total += (B.b(wh, wh, w, w) + 2.0 * B.b0(c0, w)) * quad.tail(s - 1)
    total -= 2.0 * (B.b(wh, lap_h, w, lap) + B.b0(c0, lap)) * quad.tail(s - 2)
    # small-m end: u_m ~ c_s (u0/m + g0 - m g1), g0 = (-Delta)^-1 w, g1 = (-Delta)^-2 w
    qn = np.where(q > 0, q, 1.0)
    g0h = np.where(q > 0, wh / qn, 0.0)
    g1h = np.where(q > 0, wh / qn ** 2, 0.0)
    g0 = spectral.ifftn(g0h)
    g1 = spectral.ifftn(g1h)
    total += 2.0 * B.b0(c0, g0) * quad.tail(s)
    total += (B.b(g0h, g0h, g0, g0) - 2.0 * B.b0(c0, g1)) * quad.tail(s + 1)
    kinetic = cs2 * total * hd
    pot = float(np.sum(weight.lap * absu)) * hd
    return kinetic - 2.0 * a / (a + 2.0) * pot
