import math

import numpy as np
import pytest

from fracnls import GridSpec, ModelParams, evolution as ev, ground_state as gs, spectral
from fracnls.errors import ConfigRangeError, DivergedFieldError


@pytest.fixture(scope="module")
def stable():
    # alpha = 2 < 4s/d = 2.8: mass-subcritical, orbitally stable standing wave
    p = ModelParams(1, 0.7, 2.0)
    return gs.solve(p, GridSpec(1, 100.0, 2048), tol=1e-12, res_tol=1e-11)


def test_plane_wave_step(grid2):
    p = ModelParams(2, 0.8, 2.0)
    k = np.array([2.0, -1.0]) * math.pi / grid2.L
    u = np.exp(1j * (k[0] * grid2.coords[0] + k[1] * grid2.coords[1]))
    dt = 0.05
    out = ev.step(grid2, u, p, dt)
    expect = u * np.exp(-1j * np.linalg.norm(k) ** 1.6 * dt) * np.exp(1j * dt)
    np.testing.assert_allclose(out, expect, atol=1e-12)
    np.testing.assert_allclose(np.abs(out), 1.0, atol=1e-13)


def test_zero_and_reversal(grid2, rng):
    p = ModelParams(2, 0.8, 2.0)
    assert not np.any(ev.step(grid2, np.zeros(grid2.shape, complex), p, 0.1))
    r2 = sum(c * c for c in grid2.coords)
    u = np.exp(-r2 / 2) * np.exp(0.3j * grid2.coords[0])
    back = ev.step(grid2, ev.step(grid2, u, p, 0.01), p, -0.01)
    assert np.abs(back - u).max() < 1e-13


def test_step_rejects_nan(grid2):
    u = np.zeros(grid2.shape, complex)
    u[0, 0] = np.nan
    with pytest.raises(DivergedFieldError):
        ev.step(grid2, u, ModelParams(2, 0.8, 2.0), 0.1)


def test_standing_wave_order(stable):
    p, g, phi = stable.params, stable.grid, stable.field
    T, errs = 1.0, []
    for dt in (0.04, 0.02, 0.01):
        u = phi.astype(complex)
        for _ in range(round(T / dt)):
            u = ev.step(g, u, p, dt)
        errs.append(math.sqrt(spectral.mass(g, u - np.exp(1j * p.omega * T) * phi)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all((orders > 1.9) & (orders < 2.1))


def test_standing_wave_hs_constant(stable):
    rows = []
    out = ev.evolve(stable.grid, stable.field, stable.params, ev.EvolveConfig(dt0=5e-4, t_max=1.0, diag_stride=100), sink=rows.append)
    assert out.status == ev.COMPLETED
    hs = np.array([r.hs_seminorm_sq for r in rows])
    assert np.abs(hs / hs[0] - 1).max() <= 1e-6


def test_small_gaussian_conservation():
    p = ModelParams(1, 0.6, 1.0)
    g = GridSpec(1, 30.0, 512)
    u0 = 0.25 * np.exp(-g.x ** 2 / 2) * (1 + 0j)
    rows = []
    out = ev.evolve(g, u0, p, ev.EvolveConfig(dt0=1e-3, t_max=1.0, adaptive=False, diag_stride=100), sink=rows.append)
    assert out.status == ev.COMPLETED
    assert out.t_end == pytest.approx(1.0, abs=1e-12)
    m = np.array([r.mass for r in rows])
    e = np.array([r.energy for r in rows])
    assert np.abs(m / m[0] - 1).max() <= 1e-10
    assert np.abs(e / e[0] - 1).max() <= 1e-7
    t = [r.t for r in rows]
    assert all(b > a for a, b in zip(t, t[1:]))


def test_fused_loop_matches_step():
    # the fused half steps must reproduce plain Strang steps
    p = ModelParams(1, 0.6, 2.0)
    g = GridSpec(1, 20.0, 256)
    u0 = 0.8 * np.exp(-g.x ** 2) * (1 + 0j)
    out = ev.evolve(g, u0, p, ev.EvolveConfig(dt0=0.01, t_max=0.2, adaptive=False, diag_stride=7))
    u = u0
    for _ in range(20):
        u = ev.step(g, u, p, 0.01)
    assert np.abs(out.state - u).max() < 1e-13


def test_t_max_truncation():
    p = ModelParams(1, 0.6, 1.0)
    g = GridSpec(1, 20.0, 128)
    out = ev.evolve(g, 0.1 * np.exp(-g.x ** 2) * (1 + 0j), p, ev.EvolveConfig(dt0=0.03, t_max=0.1, adaptive=False))
    assert out.t_end == pytest.approx(0.1, abs=1e-15)
    assert out.steps == 4
    assert out.final.dt == pytest.approx(0.01)


def test_blowup_detected_1d():
    # mass-supercritical in 1D (alpha > 4s), large Gaussian
    p = ModelParams(1, 0.6, 3.0)
    g = GridSpec(1, 10.0, 1024)
    rows = []
    out = ev.evolve(g, 3.0 * np.exp(-g.x ** 2) * (1 + 0j), p, ev.EvolveConfig(dt0=1e-3, t_max=2.0), sink=rows.append)
    assert out.status == ev.BLOWUP
    assert out.final.hs_seminorm_sq >= 100 * out.initial.hs_seminorm_sq
    assert out.blowup_time_estimate == out.t_end < 2.0
    assert out.certification in ("resolved growth", "under-resolved growth")
    hs = [r.hs_seminorm_sq for r in rows[-10:]]
    assert all(b > a for a, b in zip(hs, hs[1:]))
    s = out.summary()
    assert s["status"] == ev.BLOWUP and s["hs_growth"] >= 100


def test_linf_trigger():
    p = ModelParams(1, 0.6, 3.0)
    g = GridSpec(1, 10.0, 1024)
    cfg = ev.EvolveConfig(dt0=1e-3, t_max=2.0, blowup_linf=4.0, blowup_hs_factor=1e9)
    out = ev.evolve(g, 3.0 * np.exp(-g.x ** 2) * (1 + 0j), p, cfg)
    assert out.status == ev.BLOWUP and "linf" in out.trigger


def test_adapt_dt():
    p = ModelParams(1, 0.5, 2.0)
    g = GridSpec(1, 10.0, 64)
    cfg = ev.EvolveConfig(dt0=0.01, cfl_const=0.1)
    assert ev.adapt_dt(np.zeros(g.shape, complex), p, cfg) == 0.01
    assert ev.adapt_dt(np.full(g.shape, math.sqrt(3.0), complex), p, cfg) == pytest.approx(0.01)
    cfg = ev.EvolveConfig(dt0=1.0, cfl_const=0.1, dt_min=1e-12)
    dts = [ev.adapt_dt(np.full(g.shape, a, complex), p, cfg) for a in (0.5, 1.0, 2.0, 10.0)]
    assert all(b <= a for a, b in zip(dts, dts[1:]))
    assert dts[0] == pytest.approx(0.1 / 1.25)


@pytest.mark.parametrize("kw", [dict(dt0=0.0), dict(dt_min=0.1, dt0=0.01), dict(diag_stride=0), dict(cfl_const=-1.0)])
def test_evolve_config_validation(kw):
    with pytest.raises(ConfigRangeError):
        ev.EvolveConfig(**kw)


def test_nonfinite_initial_data():
    g = GridSpec(1, 10.0, 64)
    u = np.zeros(g.shape, complex)
    u[3] = np.inf
    with pytest.raises(DivergedFieldError):
        ev.evolve(g, u, ModelParams(1, 0.5, 1.0), ev.EvolveConfig())


def test_row_fields():
    assert ev.ROW_FIELDS[0] == "t"
    assert len(ev.ROW_FIELDS) == len(ev.DiagnosticsRow.__dataclass_fields__)
