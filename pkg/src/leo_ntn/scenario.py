"""Physical constants and study configuration.

A scenario file is flat ``key = value`` text. Keys are the field names of
:class:`ScenarioConfig` and :class:`PhysicalConstants`, values are SI units
(meters, radians, hertz, seconds). ``#`` starts a comment::

    # Ku-band, upper edge
    altitude_m = 1.2e6
    carrier_hz = 14e9
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

__all__ = [
    "PhysicalConstants",
    "ScenarioConfig",
    "ScenarioError",
    "load_scenario",
    "load_scenario_file",
    "render_scenario",
]


class ScenarioError(ValueError):
    """Raised for malformed or invalid scenario documents."""


@dataclass(frozen=True)
class PhysicalConstants:
    earth_radius_m: float = 6.371e6
    earth_mu_m3s2: float = 3.986004418e14
    light_speed_ms: float = 2.99792458e8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise ScenarioError(f"{f.name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """One LEO backhaul study: orbit, beam, elevation mask and carrier.

    ``feeder_extra_delay_s`` is the satellite-to-donor delay on top of the
    ``altitude / c`` approximation, so the default (0) treats the feeder leg
    as one altitude long.
    """

    altitude_m: float = 1.2e6
    beam_diameter_m: float = 3.2e5
    min_elevation_rad: float = math.radians(45.0)
    carrier_hz: float = 14e9
    feeder_extra_delay_s: float = 0.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        for name in ("altitude_m", "beam_diameter_m", "min_elevation_rad",
                     "carrier_hz", "feeder_extra_delay_s"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ScenarioError(f"{name} must be finite, got {value!r}")
        if not self.altitude_m > 0:
            raise ScenarioError(f"altitude_m must be > 0, got {self.altitude_m!r}")
        if not self.beam_diameter_m > 0:
            raise ScenarioError(f"beam_diameter_m must be > 0, got {self.beam_diameter_m!r}")
        if not 0 < self.min_elevation_rad <= math.pi / 2:
            raise ScenarioError(
                f"min_elevation_rad must satisfy 0 < value <= pi/2, got {self.min_elevation_rad!r}")
        if not self.carrier_hz > 0:
            raise ScenarioError(f"carrier_hz must be > 0, got {self.carrier_hz!r}")
        if self.feeder_extra_delay_s < 0:
            raise ScenarioError(
                f"feeder_extra_delay_s must be >= 0, got {self.feeder_extra_delay_s!r}")

    @property
    def orbit_radius_m(self) -> float:
        return self.constants.earth_radius_m + self.altitude_m

    def with_overrides(self, **values) -> "ScenarioConfig":
        """Copy with scenario and/or constant fields replaced (validated)."""
        const_keys = _CONSTANT_KEYS & values.keys()
        consts = replace(self.constants, **{k: values.pop(k) for k in const_keys})
        unknown = set(values) - _SCENARIO_KEYS
        if unknown:
            raise ScenarioError(f"unknown scenario key(s): {', '.join(sorted(unknown))}")
        return replace(self, constants=consts, **values)


_SCENARIO_KEYS = frozenset(f.name for f in fields(ScenarioConfig) if f.name != "constants")
_CONSTANT_KEYS = frozenset(f.name for f in fields(PhysicalConstants))
SCENARIO_KEYS = tuple(f.name for f in fields(ScenarioConfig) if f.name != "constants") + tuple(
    f.name for f in fields(PhysicalConstants))


def load_scenario(text: str) -> ScenarioConfig:
    """Parse a scenario document; missing keys take the default values."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _SCENARIO_KEYS and key not in _CONSTANT_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value.strip())
        except ValueError:
            raise ScenarioError(
                f"line {lineno}: key {key!r} has non-numeric value {value.strip()!r}") from None
    return ScenarioConfig().with_overrides(**values)


def load_scenario_file(path) -> ScenarioConfig:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


def render_scenario(cfg: ScenarioConfig) -> str:
    """Serialize ``cfg`` so that ``load_scenario(render_scenario(cfg)) == cfg``."""
    lines = []
    for name in SCENARIO_KEYS:
        lines.append(f"{name} = {_value_of(cfg, name)!r}")
    return "\n".join(lines) + "\n"


def _value_of(cfg: ScenarioConfig, name: str) -> float:
    if name in _CONSTANT_KEYS:
        return float(getattr(cfg.constants, name))
    return float(getattr(cfg, name))
