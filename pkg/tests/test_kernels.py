import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from fracnls import _kernels as K


@pytest.fixture
def field(rng):
    return np.ascontiguousarray(rng.normal(size=(32, 32)) + 1j * rng.normal(size=(32, 32)))


@pytest.mark.parametrize("alpha", [1.0, 2.0, 1.5, 4.0 / 3.0])
def test_nonlinear_phase_matches_numpy(field, alpha):
    ref = K._np_nonlinear_phase(field.copy(), alpha, 0.37)
    out = K.nonlinear_phase(field.copy(), alpha, 0.37)
    np.testing.assert_allclose(out, ref, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(np.abs(out), np.abs(field), rtol=1e-14)


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not available")
@pytest.mark.parametrize("alpha", [1.5, 4.0 / 3.0, 0.7])
def test_numba_general_exponents(field, alpha):
    # these exponents dispatch to numpy, so call the loops directly
    flat = field.copy().reshape(-1)
    K._nb_nonlinear_phase(flat, alpha, 0.37)
    np.testing.assert_allclose(flat, K._np_nonlinear_phase(field.copy(), alpha, 0.37).reshape(-1), rtol=1e-13, atol=1e-13)
    out = np.empty(field.size, complex)
    K._nb_power_complex(field.reshape(-1), alpha, out)
    np.testing.assert_allclose(out, K._np_power_nonlinearity(field, alpha).reshape(-1), rtol=1e-13)
    s = K._nb_abs_power_sum_complex(field.reshape(-1), alpha + 2)
    assert s == pytest.approx(K._np_abs_power_sum(field, alpha + 2), rel=1e-12)


def test_nonlinear_phase_noncontiguous(field):
    view = field[:, ::2]
    ref = view * np.exp(0.1j * np.abs(view) ** 2)
    np.testing.assert_allclose(K.nonlinear_phase(view, 2.0, 0.1), ref, rtol=1e-14)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.7])
def test_power_and_sums(field, alpha):
    np.testing.assert_allclose(K.power_nonlinearity(field, alpha), np.abs(field) ** alpha * field, rtol=1e-13)
    np.testing.assert_allclose(K.power_nonlinearity(field.real.copy(), alpha), np.abs(field.real) ** alpha * field.real, rtol=1e-13)
    assert K.abs_power_sum(field, alpha + 2) == pytest.approx(np.sum(np.abs(field) ** (alpha + 2)), rel=1e-12)
    assert K.abs_power_sum(field.real.copy(), 3.0) == pytest.approx(np.sum(np.abs(field.real) ** 3), rel=1e-12)


def test_sup_and_finite(field):
    assert K.sup_abs(field) == pytest.approx(np.abs(field).max(), rel=1e-15)
    assert K.all_finite(field)
    bad = field.copy()
    bad[3, 4] = np.nan
    assert np.isnan(K.sup_abs(bad))
    assert not K.all_finite(bad)
    bad[3, 4] = np.inf
    assert not K.all_finite(bad)
    assert K.sup_abs(np.zeros(0, dtype=complex)) == 0.0


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, FRACNLS_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "import fracnls; print(fracnls.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
