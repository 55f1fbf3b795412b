"""Scenario description and its flat ``key = value`` text format.

A config file holds one assignment per line. Blank lines and text after
``#`` are ignored; every key must be a known field and may appear once.
Keys that are omitted take the baseline values below.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields

__all__ = ["ScenarioConfig", "ConfigError", "parse_config", "load_config", "dump_config"]


class ConfigError(ValueError):
    """Malformed or out-of-range scenario configuration."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one RIS-aided uplink experiment.

    Array sizes are given as columns (``*_y``) and rows (``*_z``) of the
    planar arrays, spacings in wavelengths. Angles are in degrees:
    ``theta_A/omega_A`` is the RIS arrival direction seen at the BS,
    ``theta_D/omega_D`` the departure direction at the RIS,
    ``theta_Ad/omega_Ad`` the UE line of sight at the BS and
    ``theta_Dr/omega_Dr`` the UE line of sight at the RIS.
    """

    M_y: int = 8
    M_z: int = 4
    N_y: int = 8
    N_z: int = 8
    d_b: float = 0.5
    d_r: float = 0.2
    rho_d: float = 0.7
    rho_ru: float = 0.7
    kappa_d: float = 1.0
    kappa_ru: float = 1.0
    beta_d: float = 0.69
    beta_br: float = 0.0025
    beta_ru: float = 0.69
    tau_bar: float = 1.0
    theta_A: float = 109.9
    omega_A: float = -29.9
    theta_D: float = 77.1
    omega_D: float = 19.95
    theta_Ad: float = 71.95
    omega_Ad: float = 25.1
    theta_Dr: float = 80.94
    omega_Dr: float = -64.35
    seed: int = 1

    def __post_init__(self):
        for name in ("M_y", "M_z", "N_y", "N_z"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"must be a positive integer, got {v}", field=name)
        for name in ("d_b", "d_r", "tau_bar"):
            _check(name, getattr(self, name), lambda v: v > 0, "must be > 0")
        for name in ("rho_d", "rho_ru"):
            _check(name, getattr(self, name), lambda v: 0 <= v <= 1, "must lie in [0, 1]")
        for name in ("kappa_d", "kappa_ru"):
            _check(name, getattr(self, name), lambda v: v >= 0, "must be >= 0", allow_inf=True)
        for name in ("beta_d", "beta_br", "beta_ru"):
            _check(name, getattr(self, name), lambda v: v >= 0, "must be >= 0")
        for name in ("theta_A", "theta_D", "theta_Ad", "theta_Dr"):
            _check(name, getattr(self, name), lambda v: 0 <= v <= 180, "elevation must lie in [0, 180]")
        for name in ("omega_A", "omega_D", "omega_Ad", "omega_Dr"):
            _check(name, getattr(self, name), lambda v: -90 <= v <= 90, "azimuth must lie in [-90, 90]")
        if int(self.seed) != self.seed:
            raise ConfigError(f"must be an integer, got {self.seed}", field="seed")

    @property
    def M(self) -> int:
        return self.M_y * self.M_z

    @property
    def N(self) -> int:
        return self.N_y * self.N_z

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _check(name, value, ok, msg, allow_inf=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"must be numeric, got {value!r}", field=name)
    if math.isnan(value) or (math.isinf(value) and not allow_inf) or not ok(value):
        raise ConfigError(f"{msg}, got {value}", field=name)


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _convert(name, text, line):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "int":
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as {kind}", line=line, field=name) from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse the flat text format into a validated ``ScenarioConfig``."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=lineno)
        key, val = (s.strip() for s in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError("unknown key", line=lineno, field=key)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=lineno, field=key)
        values[key] = _convert(key, val, lineno)
        lines[key] = lineno
    try:
        return ScenarioConfig(**values)
    except ConfigError as err:
        raise ConfigError(str(err).split(": ", 1)[-1], line=lines.get(err.field), field=err.field) from None


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(cfg: ScenarioConfig | None = None) -> str:
    """Serialise ``cfg`` (default: the baseline) so that parsing restores it exactly."""
    cfg = cfg or ScenarioConfig()
    out = ["# RIS-aided uplink scenario; angles in degrees, spacings in wavelengths"]
    for f in fields(ScenarioConfig):
        v = getattr(cfg, f.name)
        out.append(f"{f.name} = {v!r}" if f.type != "int" else f"{f.name} = {int(v)}")
    return "\n".join(out) + "\n"
