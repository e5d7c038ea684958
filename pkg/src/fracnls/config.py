"""Flat ``key = value`` experiment configuration.

One assignment per line, ``#`` starts a comment, blank lines are ignored.
Only the keys in :data:`DEFAULTS` are accepted; ``d``, ``s`` and ``alpha``
are required.
"""
import math
import os
from dataclasses import asdict, dataclass, fields, replace

from .errors import (
    ConfigError,
    ConfigParseError,
    ConfigRangeError,
    DomainError,
    MissingConfigError,
    UnknownKeyError,
)
from .evolution import EvolveConfig
from .params import ModelParams
from .spectral import GridSpec

REQUIRED = ("d", "s", "alpha")

DEFAULTS = {
    "d": None,
    "s": None,
    "alpha": None,
    "omega": 1.0,
    "L": 40.0,
    "N": 256,
    "dt0": 1e-3,
    "dt_min": 1e-9,
    "t_max": 10.0,
    "lambda0": 1.1,
    "R": 2.0,
    "epsilon": None,
    "cfl_const": 0.1,
    "diag_stride": 10,
    "snapshot_stride": 0,
    "deterministic": True,
    "output_dir": "out",
    "blowup_hs_factor": 100.0,
    "blowup_linf": 1e6,
}

INT_KEYS = {"d", "N", "diag_stride", "snapshot_stride"}
BOOL_KEYS = {"deterministic"}
STR_KEYS = {"output_dir"}

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


def epsilon_bound(s, alpha):
    """Upper bound ``(2s - 1) alpha / (2s)`` for the localized-virial epsilon."""
    return (2.0 * s - 1.0) * alpha / (2.0 * s)


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    s: float
    alpha: float
    omega: float = 1.0
    L: float = 40.0
    N: int = 256
    dt0: float = 1e-3
    dt_min: float = 1e-9
    t_max: float = 10.0
    lambda0: float = 1.1
    R: float = 2.0
    epsilon: float = None
    cfl_const: float = 0.1
    diag_stride: int = 10
    snapshot_stride: int = 0
    deterministic: bool = True
    output_dir: str = "out"
    blowup_hs_factor: float = 100.0
    blowup_linf: float = 1e6

    @property
    def params(self):
        return ModelParams(self.d, self.s, self.alpha, self.omega)

    @property
    def grid(self):
        return GridSpec(self.d, self.L, self.N)

    @property
    def evolve(self):
        return EvolveConfig(
            dt0=self.dt0,
            dt_min=self.dt_min,
            t_max=self.t_max,
            blowup_hs_factor=self.blowup_hs_factor,
            blowup_linf=self.blowup_linf,
            cfl_const=self.cfl_const,
            diag_stride=self.diag_stride,
        )

    def with_values(self, **kw):
        return validate(replace(self, **kw))


def _parse_value(key, text):
    text = text.strip()
    try:
        if key in INT_KEYS:
            v = float(text)
            if v != int(v):
                raise ValueError
            return int(v)
        if key in BOOL_KEYS:
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError
        if key in STR_KEYS:
            if not text:
                raise ValueError
            return text
        if key == "epsilon" and text.lower() in ("", "none", "auto"):
            return None
        return float(text)
    except ValueError:
        raise ConfigParseError(f"bad value for {key!r}: {text!r}") from None


def parse_text(text, source="<string>"):
    """Parse config text into a ``{key: value}`` dict (no defaults, no range checks)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in DEFAULTS:
            raise UnknownKeyError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigParseError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = _parse_value(key, value)
    return out


def parse_override(item):
    """``"key=value"`` from the command line."""
    if "=" not in item:
        raise ConfigParseError(f"override must look like key=value, got {item!r}")
    key, value = (p.strip() for p in item.split("=", 1))
    if key not in DEFAULTS:
        raise UnknownKeyError(f"unknown key {key!r}")
    return key, _parse_value(key, value)


def validate(cfg):
    """Range checks; every failure is a :class:`ConfigRangeError` naming the bound."""
    try:
        p = cfg.params
        cfg.grid
        cfg.evolve
    except ConfigError:
        raise
    except DomainError as exc:
        raise ConfigRangeError(str(exc)) from None
    if not cfg.lambda0 > 0:
        raise ConfigRangeError(f"lambda0 must be positive, got {cfg.lambda0}")
    if not cfg.R > 1:
        raise ConfigRangeError(f"R must satisfy R > 1, got {cfg.R}")
    if cfg.snapshot_stride < 0:
        raise ConfigRangeError(f"snapshot_stride must be >= 0, got {cfg.snapshot_stride}")
    if cfg.epsilon is not None:
        bound = epsilon_bound(p.s, p.alpha)
        if not 0 < cfg.epsilon < bound:
            raise ConfigRangeError(
                f"epsilon={cfg.epsilon} violates 0 < epsilon < (2s-1)alpha/(2s) = {bound:.6g}"
            )
    return cfg


def from_dict(values):
    missing = [k for k in REQUIRED if values.get(k) is None]
    if missing:
        raise ConfigParseError(f"missing required key(s): {', '.join(missing)}")
    merged = {k: v for k, v in DEFAULTS.items() if v is not None}
    merged.update({k: v for k, v in values.items() if v is not None or k == "epsilon"})
    if merged.get("epsilon") is None:
        b = epsilon_bound(merged["s"], merged["alpha"])
        merged["epsilon"] = 0.5 * b if b > 0 else None
    return validate(ExperimentConfig(**merged))


def load_config(path, overrides=()):
    """Read, default-fill and range-check a config file.

    ``overrides`` is a sequence of ``"key=value"`` strings applied on top.
    """
    if not os.path.isfile(path):
        raise MissingConfigError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from None
    values = parse_text(text, source=str(path))
    for item in overrides:
        k, v = parse_override(item)
        values[k] = v
    return from_dict(values)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def dump_config(cfg):
    """Text that :func:`parse_text` reads back to an equal config."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {'auto' if v is None else _fmt(v)}")
    return "\n".join(lines) + "\n"


def as_dict(cfg):
    return asdict(cfg)
