"""Field snapshots and the diagnostics CSV.

A snapshot ``<stem>`` is a pair: ``<stem>.json`` with the header
``{schema_version, d, s, alpha, omega, L, N, t}`` and ``<stem>.bin`` with
the samples as little-endian float64, interleaved (re, im), row-major.
"""
import json
import math
import os

import numpy as np

from .errors import FieldShapeError
from .evolution import ROW_FIELDS

SCHEMA_VERSION = 1
CSV_HEADER = ",".join(ROW_FIELDS)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def clean_json(obj):
    """Replace non-finite floats by ``None`` so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_json(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return None
    return obj


def write_snapshot(stem, grid, params, t, u):
    u = np.asarray(u)
    if u.shape != grid.shape:
        raise FieldShapeError(f"field shape {u.shape} does not match grid shape {grid.shape}")
    header = {
        "schema_version": SCHEMA_VERSION,
        "d": grid.d,
        "s": params.s,
        "alpha": params.alpha,
        "omega": params.omega,
        "L": grid.L,
        "N": grid.N,
        "t": float(t),
    }
    write_json(f"{stem}.json", header)
    np.ascontiguousarray(u, dtype="<c16").tofile(f"{stem}.bin")
    return header


def read_snapshot(stem):
    """Return ``(header, field)``."""
    with open(f"{stem}.json", encoding="utf-8") as fh:
        header = json.load(fh)
    shape = (header["N"],) * header["d"]
    data = np.fromfile(f"{stem}.bin", dtype="<c16")
    if data.size != math.prod(shape):
        raise FieldShapeError(f"{stem}.bin holds {data.size} values, header implies {math.prod(shape)}")
    return header, data.reshape(shape)


class DiagnosticsCSV:
    """Row sink writing ``%.17g`` values under the fixed header; rows must advance in ``t``."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(CSV_HEADER + "\n")
        self._last_t = -math.inf
        self.closed = False

    def __call__(self, row):
        if self.closed:
            raise ValueError("diagnostics sink is closed")
        if not row.t > self._last_t:
            raise ValueError(f"diagnostics rows must be strictly increasing in t ({row.t} after {self._last_t})")
        self._last_t = row.t
        self._fh.write(",".join("%.17g" % v for v in row.values()) + "\n")

    def close(self):
        if not self.closed:
            self._fh.close()
            self.closed = True

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics(path):
    """Structured array with one named column per header field."""
    return np.genfromtxt(path, delimiter=",", names=True, dtype=float, ndmin=1)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
