"""Pointwise kernels used in the hot loops.

Every kernel has a numba ``@njit`` implementation and a pure-numpy one.
The numba path is used when numba imports and ``FRACNLS_NUMBA`` is not
set to ``0``; ``FRACNLS_NUMBA=0`` forces the numpy path. Both paths are
serial, so results are reproducible run to run.
"""
import math
import os

import numpy as np

_WANT_NUMBA = os.environ.get("FRACNLS_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --- numpy reference path -------------------------------------------------

def _np_nonlinear_phase(u, alpha, tau):
    # modulus is conserved, so the phase uses |u| before and after alike
    u *= np.exp(1j * tau * np.abs(u) ** alpha)
    return u


def _np_power_nonlinearity(u, alpha):
    return np.abs(u) ** alpha * u


def _np_abs_power_sum(u, p):
    return float(np.sum(np.abs(u) ** p))


def _np_sup_abs(u):
    return float(np.max(np.abs(u))) if u.size else 0.0


def _np_all_finite(u):
    return bool(np.all(np.isfinite(u)))


# --- numba path -----------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _modpow(r2, half):
        # |z|**(2 half) from |z|**2; common exponents skip pow()
        if half == 1.0:
            return r2
        if half == 0.5:
            return math.sqrt(r2)
        if half == 2.0:
            return r2 * r2
        if half == 1.5:
            return r2 * math.sqrt(r2)
        return r2 ** half

    @njit(cache=True)
    def _nb_nonlinear_phase(flat, alpha, tau):
        half = 0.5 * alpha
        for i in range(flat.size):
            z = flat[i]
            th = tau * _modpow(z.real * z.real + z.imag * z.imag, half)
            c = math.cos(th)
            s = math.sin(th)
            flat[i] = complex(z.real * c - z.imag * s, z.real * s + z.imag * c)

    @njit(cache=True)
    def _nb_power_real(flat, alpha, out):
        for i in range(flat.size):
            x = flat[i]
            out[i] = abs(x) ** alpha * x

    @njit(cache=True)
    def _nb_power_complex(flat, alpha, out):
        half = 0.5 * alpha
        for i in range(flat.size):
            z = flat[i]
            out[i] = _modpow(z.real * z.real + z.imag * z.imag, half) * z

    @njit(cache=True)
    def _nb_abs_power_sum_real(flat, p):
        acc = 0.0
        for i in range(flat.size):
            acc += abs(flat[i]) ** p
        return acc

    @njit(cache=True)
    def _nb_abs_power_sum_complex(flat, p):
        acc = 0.0
        for i in range(flat.size):
            z = flat[i]
            acc += _modpow(z.real * z.real + z.imag * z.imag, 0.5 * p)
        return acc

    @njit(cache=True)
    def _nb_sup_abs_real(flat):
        m = 0.0
        for i in range(flat.size):
            a = abs(flat[i])
            if a > m:
                m = a
            elif a != a:
                return a
        return m

    @njit(cache=True)
    def _nb_sup_abs_complex(flat):
        # max of |z|**2, one sqrt at the end (overflows only past 1e154)
        m = 0.0
        for i in range(flat.size):
            z = flat[i]
            a = z.real * z.real + z.imag * z.imag
            if a > m:
                m = a
            elif a != a:
                return a
        return math.sqrt(m)

    @njit(cache=True)
    def _nb_all_finite_real(flat):
        for i in range(flat.size):
            if not math.isfinite(flat[i]):
                return False
        return True

    @njit(cache=True)
    def _nb_all_finite_complex(flat):
        for i in range(flat.size):
            z = flat[i]
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                return False
        return True


def _flat(u):
    return u.reshape(-1)


# exponents with a pow()-free loop; for others numpy's vector pow is faster
_FAST_EXPONENTS = (1.0, 2.0, 3.0, 4.0)


def _use_numba(u, exponent=1.0):
    return HAVE_NUMBA and u.flags.c_contiguous and float(exponent) in _FAST_EXPONENTS


def nonlinear_phase(u, alpha, tau):
    """In place: ``u <- u * exp(i * tau * |u|**alpha)``. ``u`` must be complex and contiguous."""
    if _use_numba(u, alpha):
        _nb_nonlinear_phase(_flat(u), float(alpha), float(tau))
        return u
    return _np_nonlinear_phase(u, alpha, tau)


def power_nonlinearity(u, alpha):
    """``|u|**alpha * u`` as a new array."""
    if _use_numba(u, alpha):
        out = np.empty_like(u)
        if np.iscomplexobj(u):
            _nb_power_complex(_flat(u), float(alpha), _flat(out))
        else:
            _nb_power_real(_flat(u), float(alpha), _flat(out))
        return out
    return _np_power_nonlinearity(u, alpha)


def abs_power_sum(u, p):
    """``sum |u|**p`` over all entries."""
    if _use_numba(u, p):
        if np.iscomplexobj(u):
            return float(_nb_abs_power_sum_complex(_flat(u), float(p)))
        return float(_nb_abs_power_sum_real(_flat(u), float(p)))
    return _np_abs_power_sum(u, p)


def sup_abs(u):
    """``max |u|``; NaN if any entry is NaN."""
    if HAVE_NUMBA and u.flags.c_contiguous and u.size:
        if np.iscomplexobj(u):
            return float(_nb_sup_abs_complex(_flat(u)))
        return float(_nb_sup_abs_real(_flat(u)))
    return _np_sup_abs(u)


def all_finite(u):
    if HAVE_NUMBA and u.flags.c_contiguous:
        if np.iscomplexobj(u):
            return bool(_nb_all_finite_complex(_flat(u)))
        return bool(_nb_all_finite_real(_flat(u)))
    return _np_all_finite(u)


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA else "numpy"
