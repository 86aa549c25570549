"""Run configuration and report records for the check runner."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .model import PhysParams, SignBranch

FORMATS = ("json", "csv", "both")


class ConfigError(ValueError):
    """Bad configuration value or file; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    n_max: int = 24
    theta: float = 0.3
    branch: str = "plus"
    omega: float = 1.0
    gamma: float = 0.2
    mass: float = 1.0
    hbar: float = 1.0
    tol: float = 1e-8
    margin: int = 2
    quad_nodes: int = 64
    out_dir: str = "."
    format: str = "json"

    def __post_init__(self):
        if self.n_max < 2:
            raise ConfigError("n_max must be >= 2")
        if not math.isfinite(self.theta):
            raise ConfigError("theta must be finite")
        try:
            SignBranch.parse(self.branch)
        except ValueError:
            raise ConfigError(f"branch must be plus or minus, got {self.branch!r}") from None
        for name in ("omega", "mass", "hbar", "tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive, got {value!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError(f"gamma must be non-negative, got {self.gamma!r}")
        if self.margin < 0:
            raise ConfigError("margin must be >= 0")
        if self.quad_nodes < 1:
            raise ConfigError("quad_nodes must be >= 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")

    @property
    def params(self) -> PhysParams:
        return PhysParams(m=self.mass, omega=self.omega, gamma=self.gamma, hbar=self.hbar)

    @property
    def sign_branch(self) -> SignBranch:
        return SignBranch.parse(self.branch)

    def snapshot(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def coerce(key: str, raw: str):
    """Convert a textual value for ``key`` to the field's type."""
    name = key.strip().replace("-", "_")
    if name == "out":
        name = "out_dir"
    if name not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    cast = _CASTS[_TYPES[name]]
    try:
        if cast is int:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return name, int(value)
        return name, cast(raw.strip())
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = line.split("=", 1)
        name, value = coerce(key, raw)
        values[name] = value
    return values


@dataclass
class CheckReport:
    """One executed check. ``passed`` is serialised as ``pass``."""

    check_id: str
    params: dict
    measured: complex
    tolerance: float
    passed: bool
    elapsed: float
    error: str | None = None
