import json
import math

import numpy as np
import pytest

from fracnls import GridSpec, ModelParams, config, io
from fracnls.errors import ConfigError, FieldShapeError
from fracnls.evolution import DiagnosticsRow, ROW_FIELDS


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_config_defaults(tmp_path):
    cfg = config.load_config(write(tmp_path, "d = 2\ns = 0.8\nalpha = 2\nomega = 1\n"))
    assert (cfg.L, cfg.N, cfg.dt0, cfg.R, cfg.lambda0) == (40.0, 256, 1e-3, 2.0, 1.1)
    assert cfg.deterministic is True
    assert cfg.epsilon == pytest.approx(0.5 * (1.6 - 1) * 2 / 1.6)
    assert cfg.params == ModelParams(2, 0.8, 2.0, 1.0)
    assert cfg.grid == GridSpec(2, 40.0, 256)


def test_epsilon_auto_when_bound_nonpositive(tmp_path):
    cfg = config.load_config(write(tmp_path, "d = 1\ns = 0.5\nalpha = 1\n"))
    assert cfg.epsilon is None
    assert "epsilon = auto" in config.dump_config(cfg)


def test_alpha_above_critical_names_bound(tmp_path):
    with pytest.raises(ConfigError) as exc:
        config.load_config(write(tmp_path, "d = 2\ns = 0.8\nalpha = 9\n"))
    assert exc.value.code == "out_of_range"
    assert "alpha*" in str(exc.value) and "8" in str(exc.value)


@pytest.mark.parametrize(
    "text, code",
    [
        ("d = 2\ns = 0.8\n", "parse_error"),
        ("d = 2\ns = 0.8\nalpha = 2\nfoo = 1\n", "unknown_key"),
        ("d = 2\ns = 0.8\nalpha = two\n", "parse_error"),
        ("d = 2\ns = 0.8\nalpha = 2\nN = 7\n", "out_of_range"),
        ("d = 2\ns = 0.8\nalpha = 2\nR = 1\n", "out_of_range"),
        ("d = 2\ns = 0.8\nalpha = 2\nepsilon = 5\n", "out_of_range"),
        ("d = 2\ns = 0.8\nalpha = 2\nd = 3\n", "parse_error"),
        ("d = 2\njunk line\n", "parse_error"),
        ("d = 2\ns = 0.8\nalpha = 2\ndiag_stride = 1.5\n", "parse_error"),
    ],
)
def test_config_errors(tmp_path, text, code):
    with pytest.raises(ConfigError) as exc:
        config.load_config(write(tmp_path, text))
    assert exc.value.code == code


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError) as exc:
        config.load_config(str(tmp_path / "nope.cfg"))
    assert exc.value.code == "missing_file"


def test_round_trip_and_overrides(tmp_path):
    path = write(tmp_path, "# comment\nd = 2\ns = 0.8\nalpha = 2\nL = 5  # box\ndeterministic = off\n")
    cfg = config.load_config(path, ["lambda0=1.3", "N=128"])
    assert cfg.lambda0 == 1.3 and cfg.N == 128 and cfg.deterministic is False
    again = config.load_config(write(tmp_path, config.dump_config(cfg), "dump.cfg"))
    assert again == cfg
    with pytest.raises(ConfigError):
        config.load_config(path, ["bogus=1"])
    with pytest.raises(ConfigError):
        config.load_config(path, ["lambda0"])


def test_evolve_config_from_experiment(tmp_path):
    cfg = config.load_config(write(tmp_path, "d = 2\ns = 0.8\nalpha = 2\nt_max = 3\ncfl_const = 0.2\n"))
    ev = cfg.evolve
    assert ev.t_max == 3.0 and ev.cfl_const == 0.2 and ev.blowup_hs_factor == 100.0


def test_snapshot_round_trip(tmp_path, rng):
    g = GridSpec(2, 3.0, 16)
    p = ModelParams(2, 0.8, 2.0)
    u = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    stem = str(tmp_path / "snap")
    io.write_snapshot(stem, g, p, 0.25, u)
    header, back = io.read_snapshot(stem)
    assert header == {"schema_version": 1, "d": 2, "s": 0.8, "alpha": 2.0, "omega": 1.0, "L": 3.0, "N": 16, "t": 0.25}
    assert np.array_equal(back, u)
    raw = np.fromfile(stem + ".bin", dtype="<f8")
    assert raw[0] == u[0, 0].real and raw[1] == u[0, 0].imag
    with pytest.raises(FieldShapeError):
        io.write_snapshot(stem, g, p, 0.0, u[:4])
    np.arange(10, dtype="<c16").tofile(stem + ".bin")
    with pytest.raises(FieldShapeError):
        io.read_snapshot(stem)


def test_diagnostics_csv(tmp_path):
    path = str(tmp_path / "diag.csv")
    row = DiagnosticsRow(*([0.1] * len(ROW_FIELDS)))
    with io.DiagnosticsCSV(path) as sink:
        sink(row)
        sink(DiagnosticsRow(0.2, *([1 / 3] * (len(ROW_FIELDS) - 1))))
        with pytest.raises(ValueError):
            sink(row)
    lines = open(path).read().splitlines()
    assert lines[0] == ",".join(ROW_FIELDS)
    data = io.read_diagnostics(path)
    assert data["t"].tolist() == [0.1, 0.2]
    assert data["mass"][1] == 1 / 3  # %.17g round-trips exactly
    with pytest.raises(ValueError):
        sink(row)


def test_clean_json():
    out = io.clean_json({"a": math.nan, "b": [1.0, math.inf], "c": "x"})
    assert out == {"a": None, "b": [1.0, None], "c": "x"}
    json.dumps(out, allow_nan=False)
