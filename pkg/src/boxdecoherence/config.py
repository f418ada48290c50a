"""
Simulation configuration: flat ``key = value`` files plus overrides.

Precedence, lowest first: built-in defaults, config file, ``--set`` and
flag overrides. Unknown keys are errors.

Example file::

    # stronger decoherence, coarser grid
    d = 0.005
    n_points = 1024
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .decoherence import kernel_bytes
from .errors import ConfigError
from .lattice import MIN_POINTS, PhysicalParams, make_grid

SWEEPABLE = ("L", "hbar", "m", "p0", "q0", "sigma", "t", "d", "n_points", "rel_threshold", "weight_cutoff")

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class SimConfig:
    L: float = 1.0
    hbar: float = 1.0
    m: float = 1.0
    p0: float = 30.0
    q0: float = 0.5
    sigma: float = 0.05
    t: float = 0.5
    d: float = 0.01
    n_points: int = 2048
    max_points: int = 4096
    rel_threshold: float = 0.02
    weight_cutoff: float = 0.9
    output_dir: str = "out"
    dump_top_k: int = 0
    no_decoherence: bool = False
    reversal_check: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("L", "hbar", "m", "sigma", "d"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name}: must be positive and finite, got {value!r}")
        for name in ("p0", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name}: must be finite")
        if not 0 < self.q0 < self.L:
            raise ConfigError(f"q0: must lie in (0, L={self.L}), got {self.q0!r}")
        if self.p0 == 0:
            raise ConfigError("p0: must be nonzero (de Broglie wavelength undefined)")
        if self.n_points < MIN_POINTS:
            raise ConfigError(f"n_points: must be >= {MIN_POINTS}, got {self.n_points}")
        if self.n_points > self.max_points:
            mb = kernel_bytes(self.n_points) / 2**20
            raise ConfigError(
                f"n_points: {self.n_points} exceeds max_points={self.max_points} "
                f"(one density kernel alone needs {mb:.0f} MiB)"
            )
        if not 0 < self.rel_threshold < 1:
            raise ConfigError(f"rel_threshold: must lie in (0, 1), got {self.rel_threshold!r}")
        if not 0 < self.weight_cutoff <= 1:
            raise ConfigError(f"weight_cutoff: must lie in (0, 1], got {self.weight_cutoff!r}")
        if self.dump_top_k < 0 or self.dump_top_k > self.n_points:
            raise ConfigError(f"dump_top_k: must lie in [0, n_points], got {self.dump_top_k}")

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(hbar=self.hbar, mass=self.m, p0=self.p0, q0=self.q0, sigma=self.sigma)

    def grid(self):
        return make_grid(self.n_points, self.L)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _coerce(key: str, raw: str):
    if key not in _FIELDS:
        raise ConfigError(f"unknown key {key!r}")
    kind = _FIELDS[key].type
    text = raw.strip()
    try:
        if kind == "bool":
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if kind == "int":
            value = float(text)
            if not value.is_integer():
                raise ValueError(text)
            return int(value)
        if kind == "float":
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw.strip()!r} as {kind}") from None


def parse_config_text(text: str, source: str = "<string>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if not key or not raw:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        try:
            values[key] = _coerce(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def parse_overrides(items: Iterable[str]) -> dict:
    values = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        key, raw = item.split("=", 1)
        values[key.strip()] = _coerce(key.strip(), raw)
    return values


def load_config(
    path: Optional[str | Path] = None,
    overrides: Optional[Mapping] = None,
    base: Optional[SimConfig] = None,
) -> SimConfig:
    """Defaults, then the file at ``path``, then ``overrides``.

    Override values may be strings (coerced like file values) or already typed.
    """
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        values.update(parse_config_text(p.read_text(), str(p)))
    for key, value in (overrides or {}).items():
        values[key] = _coerce(key, value) if isinstance(value, str) else coerce_value(key, value)
    return (base or SimConfig()).replace(**values) if values else (base or SimConfig())


def coerce_value(key: str, value):
    if key not in _FIELDS:
        raise ConfigError(f"unknown key {key!r}")
    if _FIELDS[key].type == "int" and isinstance(value, float):
        if not value.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return value
