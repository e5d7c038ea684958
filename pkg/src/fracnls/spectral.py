"""Periodic grids, Fourier transforms and the fractional Laplacian.

The box is ``[-L, L)^d`` with ``N`` points per axis. Fields are numpy
arrays of shape ``(N,) * d`` in row-major axis order. The Fourier
convention is the unitary one,

    u_hat(xi) = (2 pi)^(-d/2) * integral u(x) exp(-i xi.x) dx,

discretised by a Riemann sum with weight ``h**d``. With it
``integral |u|^2 dx == integral |u_hat|^2 dxi`` and the homogeneous
Sobolev seminorm is ``integral |xi|^(2s) |u_hat|^2 dxi``.
"""
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import fft as sfft
from scipy import signal

from . import _kernels
from .errors import DivergedFieldError, DomainError, FieldShapeError, TruncationWarning

_workers = max(1, int(os.environ.get("FRACNLS_THREADS", "1") or 1))


def set_fft_workers(n):
    """Thread count for transforms. ``1`` is the deterministic serial mode."""
    global _workers
    _workers = max(1, int(n))


def fft_workers():
    return _workers


def fftn(a):
    return sfft.fftn(a, workers=_workers)


def ifftn(a):
    return sfft.ifftn(a, workers=_workers)


@dataclass(frozen=True)
class GridSpec:
    """Periodic box ``[-L, L)^d`` sampled with ``N`` points per axis."""

    d: int
    L: float
    N: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"d must be 1, 2 or 3, got {self.d}")
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if self.N < 8 or self.N % 2:
            raise DomainError(f"N must be even and >= 8, got {self.N}")

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @property
    def shape(self):
        return (self.N,) * self.d

    @property
    def cell_volume(self):
        return self.h ** self.d

    @property
    def volume(self):
        return (2.0 * self.L) ** self.d

    @property
    def dxi(self):
        return math.pi / self.L

    @property
    def nyquist(self):
        return math.pi * self.N / (2.0 * self.L)

    @cached_property
    def x(self):
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def xi(self):
        """Angular wavenumbers ``pi*k/L`` in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    @cached_property
    def coords(self):
        """Open (broadcastable) coordinate arrays, one per axis."""
        return tuple(np.meshgrid(*([self.x] * self.d), indexing="ij", sparse=True))

    @cached_property
    def wavenumbers(self):
        return tuple(np.meshgrid(*([self.xi] * self.d), indexing="ij", sparse=True))

    @cached_property
    def k2(self):
        out = np.zeros(self.shape)
        for k in self.wavenumbers:
            out = out + k * k
        return out

    @cached_property
    def radius(self):
        r2 = np.zeros(self.shape)
        for c in self.coords:
            r2 = r2 + c * c
        return np.sqrt(r2)

    def symbol(self, s):
        """``|xi|^(2s)`` on the FFT lattice, zero at the origin."""
        key = ("symbol", float(s))
        if key not in self._cache:
            self._cache[key] = self.k2 ** s
        return self._cache[key]


def check_field(grid, f):
    f = np.asarray(f)
    if f.shape != grid.shape:
        raise FieldShapeError(f"field shape {f.shape} does not match grid shape {grid.shape}")
    return f


def ensure_finite(f, what="field"):
    if not _kernels.all_finite(np.ascontiguousarray(f)):
        raise DivergedFieldError(f"{what} contains non-finite values")


def _phase(grid):
    # x starts at -L, so the continuum transform picks up exp(i xi L) = (-1)^k
    key = ("phase",)
    if key not in grid._cache:
        k = np.rint(grid.xi / grid.dxi).astype(np.int64)
        p1 = np.where(k % 2 == 0, 1.0, -1.0)
        p = np.ones(grid.shape)
        for ax in range(grid.d):
            sh = [1] * grid.d
            sh[ax] = grid.N
            p = p * p1.reshape(sh)
        grid._cache[key] = p
    return grid._cache[key]


def transform(grid, f):
    """Unitary Fourier coefficients of ``f`` in FFT order."""
    f = check_field(grid, f)
    scale = (grid.h / math.sqrt(2.0 * math.pi)) ** grid.d
    return scale * _phase(grid) * fftn(f)


def inverse_transform(grid, coeffs):
    coeffs = check_field(grid, coeffs)
    scale = (grid.h / math.sqrt(2.0 * math.pi)) ** grid.d
    return ifftn(coeffs * _phase(grid)) / scale


def spectral_mass(grid, coeffs):
    """``integral |u_hat|^2 dxi`` as a lattice sum."""
    return float(np.sum(np.abs(coeffs) ** 2)) * grid.dxi ** grid.d


def fourier_multiply(grid, f, multiplier):
    """Apply a Fourier multiplier; real input and an even real multiplier give real output."""
    f = check_field(grid, f)
    out = ifftn(multiplier * fftn(f))
    if not np.iscomplexobj(f) and not np.iscomplexobj(multiplier):
        return out.real
    return out


def fractional_laplacian(grid, f, s):
    """``(-Delta)^s f`` via the multiplier ``|xi|^(2s)``."""
    if not 0.0 < s <= 1.0:
        raise DomainError(f"fractional order must satisfy 0 < s <= 1, got {s}")
    return fourier_multiply(grid, f, grid.symbol(s))


def gradient(grid, f):
    """Spectral gradient; the Nyquist mode is dropped so real input stays real."""
    f = check_field(grid, f)
    fh = fftn(f)
    nyq = np.isclose(np.abs(grid.xi), grid.nyquist)
    xi = np.where(nyq, 0.0, grid.xi)
    out = []
    for ax in range(grid.d):
        sh = [1] * grid.d
        sh[ax] = grid.N
        g = ifftn(1j * xi.reshape(sh) * fh)
        out.append(g if np.iscomplexobj(f) else g.real)
    return out


class Norms(NamedTuple):
    mass: float
    hs_seminorm_sq: float
    lebesgue_alpha2: float
    lp_alpha2_pow: float


def mass(grid, f):
    return _kernels.abs_power_sum(np.ascontiguousarray(f), 2.0) * grid.cell_volume


def hs_seminorm_sq(grid, f, s, fhat=None):
    """``integral |xi|^(2s) |f_hat|^2 dxi``; pass ``fhat = fftn(f)`` to reuse a transform."""
    if fhat is None:
        fhat = fftn(check_field(grid, f))
    w = grid.cell_volume / grid.N ** grid.d
    return float(np.sum(grid.symbol(s) * (fhat.real ** 2 + fhat.imag ** 2))) * w


def lp_pow(grid, f, p):
    """``integral |f|^p dx``."""
    return _kernels.abs_power_sum(np.ascontiguousarray(f), p) * grid.cell_volume


def norms(grid, f, params, fhat=None):
    """Mass, Hs seminorm squared and the L^(alpha+2) norm of ``f``."""
    f = check_field(grid, f)
    ensure_finite(f)
    p = params.alpha + 2.0
    lp = lp_pow(grid, f, p)
    return Norms(
        mass=mass(grid, f),
        hs_seminorm_sq=hs_seminorm_sq(grid, f, params.s, fhat),
        lebesgue_alpha2=lp ** (1.0 / p),
        lp_alpha2_pow=lp,
    )


def boundary_ratio(grid, f):
    """Max of ``|f|`` on the outer shell of grid points relative to max ``|f|``."""
    a = np.abs(check_field(grid, f))
    peak = a.max()
    if peak == 0:
        return 0.0
    shell = 0.0
    for ax in range(grid.d):
        shell = max(shell, np.take(a, [0, 1, grid.N - 1], axis=ax).max())
    return float(shell / peak)


def check_decay(grid, f, tol=1e-10, what="field"):
    """Warn with :class:`TruncationWarning` if ``f`` is not decayed at the box edge."""
    return warn_if_truncated(boundary_ratio(grid, f), tol, what, stacklevel=4)


def warn_if_truncated(r, tol=1e-10, what="field", stacklevel=3):
    if r > tol:
        warnings.warn(
            f"{what} is not decayed at the box boundary: edge/max = {r:.2e} > {tol:.0e}",
            TruncationWarning,
            stacklevel=stacklevel,
        )
    return r


def spectral_tail_fraction(grid, f, fhat=None):
    """Share of ``sum |f_hat|^2`` in modes with some ``|xi_j|`` above 2/3 of Nyquist."""
    if fhat is None:
        fhat = fftn(check_field(grid, f))
    p = np.abs(fhat) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    key = ("outer_third",)
    if key not in grid._cache:
        outer = np.zeros(grid.shape, dtype=bool)
        cut = 2.0 / 3.0 * grid.nyquist
        for k in grid.wavenumbers:
            outer = outer | (np.abs(k) > cut)
        grid._cache[key] = outer
    return float(p[grid._cache[key]].sum() / total)


def _dilate_axis(grid, f, lam, axis):
    """Evaluate the trigonometric interpolant of ``f`` at ``lam * x`` along one axis."""
    N = grid.N
    F = np.moveaxis(np.fft.fft(f, axis=axis), axis, -1)
    # symmetric spectrum k = -N/2 .. N/2, Nyquist split in two halves (cosine)
    G = np.empty(F.shape[:-1] + (N + 1,), dtype=complex)
    G[..., : N // 2] = F[..., N // 2 :]
    G[..., N // 2 : N] = F[..., : N // 2]
    G[..., 0] *= 0.5
    G[..., N] = G[..., 0]
    k = np.arange(-N // 2, N // 2 + 1)
    H = G * np.exp(1j * math.pi * k * (1.0 - lam))
    c = 2.0 * math.pi * lam / N
    vals = signal.czt(H, m=N, w=np.exp(1j * c), a=1.0, axis=-1)
    j = np.arange(N)
    vals = vals * np.exp(-1j * c * j * (N // 2)) / N
    if lam > 1.0:
        vals = vals * _outer_taper(np.abs(lam * grid.x) / grid.L)
    return np.moveaxis(vals, -1, axis)


def _outer_taper(t, width=0.5):
    """1 for ``t <= 1``, 0 for ``t >= 1 + width``, septic smoothstep in between."""
    u = np.clip((t - 1.0) / width, 0.0, 1.0)
    return 1.0 - u ** 4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u ** 3)


def dilate(grid, f, lam):
    """Resample ``x -> f(lam * x)`` by spectral interpolation on the fixed box.

    For ``lam > 1`` the points with ``|lam * x_j| > L`` lie outside the box.
    They take the values of the periodic extension (for an even field, the
    mirror image about the box edge, so no jump at the edge) multiplied by
    a smooth taper that reaches 0 at ``|lam * x_j| = 1.5 L``, so copies of
    the bulk never re-enter. For a field decayed at the edge this is moot.
    """
    f = check_field(grid, f)
    if not lam > 0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    if lam == 1.0:
        return f.copy()
    out = f.astype(complex)
    for ax in range(grid.d):
        out = _dilate_axis(grid, out, lam, ax)
    if not np.iscomplexobj(f):
        return out.real.copy()
    return out


class EvenSpace:
    """Fields even under every reflection ``x_j -> -x_j``, stored on ``[0, L]^d``.

    Such a field on the periodic grid is also even about ``x_j = L``, so the
    FFT reduces to a type-I DCT on ``N/2 + 1`` points per axis. Multipliers,
    norms and sums give the same numbers as on the full grid.
    """

    def __init__(self, grid):
        self.grid = grid
        self.M = grid.N // 2
        n = self.M + 1
        self.x = grid.h * np.arange(n)
        self.xi = grid.dxi * np.arange(n)
        w1 = np.full(n, 2.0)
        w1[0] = w1[-1] = 1.0
        W = np.ones((n,) * grid.d)
        k2 = np.zeros((n,) * grid.d)
        r2 = np.zeros((n,) * grid.d)
        for ax in range(grid.d):
            sh = [1] * grid.d
            sh[ax] = n
            W = W * w1.reshape(sh)
            k2 = k2 + (self.xi ** 2).reshape(sh)
            r2 = r2 + (self.x ** 2).reshape(sh)
        self.weights = W
        self.k2 = k2
        self.r2 = r2

    def forward(self, f):
        return sfft.dctn(f, type=1, workers=_workers)

    def backward(self, c):
        return sfft.idctn(c, type=1, workers=_workers)

    def sum(self, g):
        """Sum of ``g`` over the full periodic grid."""
        return float(np.sum(self.weights * g))

    def coeff_sum(self, c):
        """Sum over the full FFT lattice, given DCT-I coefficients ``c``."""
        return float(np.sum(self.weights * c))

    def boundary_ratio(self, half):
        """Same number as :func:`boundary_ratio` on the full grid."""
        a = np.abs(half)
        peak = a.max()
        if peak == 0:
            return 0.0
        edge = max(np.take(a, [self.M - 1, self.M], axis=ax).max() for ax in range(self.grid.d))
        return float(edge / peak)

    def to_full(self, half):
        idx = np.abs(np.arange(self.grid.N) - self.M)
        return half[np.ix_(*([idx] * self.grid.d))]

    def from_full(self, full):
        idx = (self.M + np.arange(self.M + 1)) % self.grid.N
        return np.asarray(full)[np.ix_(*([idx] * self.grid.d))]
