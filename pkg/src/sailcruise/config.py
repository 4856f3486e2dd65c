"""Run configuration: a TOML file with one table per subsystem.

Every key is optional; missing keys take the dataclass defaults and unknown
keys are rejected.  ``dump_config`` writes the canonical form, which parses
back to the same configuration and dumps byte-identically.
"""

from __future__ import annotations

import dataclasses
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .energy import PowerModel
from .helm import RUDDER_LIMIT, PidGains, RudderBases
from .mission import MissionConfig
from .vessel import MAX_DT, Arena, VesselParams, WindField


class ConfigError(ValueError):
    """Bad configuration file; ``line`` is set for syntax errors."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        super().__init__(message)
        self.line = line
        self.path = path


@dataclass(frozen=True)
class SailSettings:
    sail_coeff: float = 0.5  # N s^2/m^2
    theta_step: float = 1.0  # deg
    phi_step: float = 1.0  # deg
    right_map: str = ""  # CSV path; empty selects the analytic map
    left_map: str = ""

    def __post_init__(self):
        if not self.sail_coeff > 0:
            raise ValueError("sail_coeff must be positive")
        if not (self.theta_step > 0 and self.phi_step > 0):
            raise ValueError("theta_step and phi_step must be positive")


@dataclass(frozen=True)
class PidSettings:
    kp: float = 0.2
    ki: float = 0.1
    kd: float = 0.01
    pid_proportion: float = 1.0
    integral_limit: float = 5.0
    clip_limit: float = RUDDER_LIMIT

    def __post_init__(self):
        self.gains  # validates
        if not self.clip_limit > 0:
            raise ValueError("clip_limit must be positive")

    @property
    def gains(self) -> PidGains:
        return PidGains(self.kp, self.ki, self.kd, self.pid_proportion, self.integral_limit)


@dataclass(frozen=True)
class RunSettings:
    dt: float = 0.05  # s
    timeout: float = 1200.0  # simulated s per cruise
    release_speed: float = 0.7  # m/s
    seeds: tuple = (1, 2, 3, 4, 5)
    output_dir: str = "out"

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not 0 < self.dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}]")
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.release_speed < 0:
            raise ValueError("release_speed must be >= 0")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if any(not 0 <= s < 2**64 for s in self.seeds):
            raise ValueError("seeds must be 64-bit unsigned integers")


@dataclass(frozen=True)
class RunConfig:
    arena: Arena = field(default_factory=Arena)
    wind: WindField = field(default_factory=WindField)
    vessel: VesselParams = field(default_factory=VesselParams)
    pid: PidSettings = field(default_factory=PidSettings)
    rudder: RudderBases = field(default_factory=RudderBases)
    mission: MissionConfig = field(default_factory=MissionConfig)
    power: PowerModel = field(default_factory=PowerModel)
    sail: SailSettings = field(default_factory=SailSettings)
    run: RunSettings = field(default_factory=RunSettings)

    def __post_init__(self):
        sp = self.mission.start_point
        if not (0 <= sp[0] <= self.arena.width and 0 <= sp[1] <= self.arena.height):
            raise ValueError("mission.start_point must lie inside the arena")

    def replace(self, section: str, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **changes)})


# keys of WindField that belong to the run, not the file
_HIDDEN = {"wind": {"seed"}}


def _section_fields(name: str, cls) -> list[dataclasses.Field]:
    hidden = _HIDDEN.get(name, set())
    return [f for f in dataclasses.fields(cls) if f.name not in hidden]


def _coerce(value, default, path: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean", path=path)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer", path=path)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number", path=path)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string", path=path)
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected an array", path=path)
        return tuple(_coerce(v, default[0], path) for v in value) if default else tuple(value)
    raise ConfigError(f"{path}: unsupported value", path=path)


def _field_in(message: str, names) -> str | None:
    for n in sorted(names, key=len, reverse=True):
        if re.search(rf"\b{re.escape(n)}\b", message):
            return n
    return None


def config_from_dict(data: dict) -> RunConfig:
    top = {f.name: f for f in dataclasses.fields(RunConfig)}
    for key in data:
        if key not in top:
            raise ConfigError(f"{key}: unknown section", path=key)
    sections = {}
    for name, f in top.items():
        cls = f.default_factory
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"{name}: expected a table", path=name)
        fields = {x.name: x for x in _section_fields(name, cls)}
        defaults = cls()
        kwargs = {}
        for key, value in raw.items():
            path = f"{name}.{key}"
            if key not in fields:
                raise ConfigError(f"{path}: unknown key", path=path)
            kwargs[key] = _coerce(value, getattr(defaults, key), path)
        try:
            sections[name] = cls(**kwargs)
        except ValueError as exc:
            fname = _field_in(str(exc), fields) or next(iter(kwargs), None)
            path = f"{name}.{fname}" if fname else name
            raise ConfigError(f"{path}: {exc}", path=path) from None
    try:
        return RunConfig(**sections)
    except ValueError as exc:
        raise ConfigError(str(exc), path="mission.start_point") from None


def parse_config(path) -> RunConfig:
    """Load a TOML run configuration; an empty file yields all defaults."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        line = int(m.group(1)) if m else None
        raise ConfigError(f"{path}: parse error: {exc}", line=line) from None
    return config_from_dict(data)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def dump_config(cfg: RunConfig) -> str:
    """Canonical TOML text for ``cfg`` (every key, in declaration order)."""
    out = []
    for f in dataclasses.fields(RunConfig):
        section = getattr(cfg, f.name)
        out.append(f"[{f.name}]")
        for sf in _section_fields(f.name, type(section)):
            out.append(f"{sf.name} = {_toml_value(getattr(section, sf.name))}")
        out.append("")
    return "\n".join(out)
