"""Propagation delay and Doppler models for the satellite backhaul.

Also models the Doppler left over after a relay pre-compensates using a
GNSS-based satellite position estimate that is off by ``position_error_m``.
The error is applied as a worst-case displacement along the ground projection
of the line of sight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import ground_track_speed, slant_range
from .scenario import PhysicalConstants, ScenarioConfig

__all__ = [
    "DelayBudget",
    "DopplerResult",
    "delay_budget",
    "round_trip_time",
    "ue_doppler",
    "sat_doppler",
    "apparent_elevation",
    "apparent_range",
    "residual_doppler",
    "residual_doppler_surface",
    "ResidualSurface",
]

_C = PhysicalConstants().light_speed_ms


@dataclass(frozen=True)
class DelayBudget:
    one_way_s: float
    round_trip_s: float
    components: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class DopplerResult:
    carrier_hz: float
    elevation_rad: float
    position_error_m: float
    true_doppler_hz: float
    estimated_doppler_hz: float
    residual_doppler_hz: float


def delay_budget(altitude_m: float, feeder_extra_delay_s: float = 0.0,
                 light_speed_ms: float = _C) -> DelayBudget:
    """Bent-pipe RTT with both legs approximated by the altitude.

    Unlike :class:`ScenarioConfig`, ``altitude_m = 0`` is accepted here (the
    terrestrial limit).
    """
    if altitude_m < 0 or feeder_extra_delay_s < 0:
        raise ValueError("altitude and feeder delay must be >= 0")
    rn_sat = 2.0 * altitude_m / light_speed_ms
    sat_dgnb = 2.0 * (altitude_m / light_speed_ms + feeder_extra_delay_s)
    rtt = rn_sat + sat_dgnb
    return DelayBudget(rtt / 2.0, rtt, (("rn_satellite", rn_sat), ("satellite_dgnb", sat_dgnb)))


def round_trip_time(cfg: ScenarioConfig) -> DelayBudget:
    return delay_budget(cfg.altitude_m, cfg.feeder_extra_delay_s, cfg.constants.light_speed_ms)


def ue_doppler(speed_ms: float, carrier_hz: float, angle_rad: float,
               light_speed_ms: float = _C) -> float:
    """Doppler of a terminal moving at ``speed_ms``; ``angle_rad`` is between velocity and line of sight."""
    if speed_ms < 0:
        raise ValueError(f"speed must be >= 0, got {speed_ms!r}")
    return speed_ms * carrier_hz * math.cos(angle_rad) / light_speed_ms


def _doppler_scale(cfg: ScenarioConfig) -> float:
    # Doppler at zero elevation; the shift at elevation el is this times cos(el)
    return cfg.carrier_hz * ground_track_speed(cfg) / cfg.constants.light_speed_ms


def _cos_elevation(elevation_rad):
    # sin(pi/2 - el) is exactly 0 at zenith, where cos(pi/2) leaves 6e-17
    return np.sin(np.pi / 2 - elevation_rad)


def sat_doppler(cfg: ScenarioConfig, elevation_rad: float) -> float:
    if not (0.0 <= elevation_rad <= math.pi / 2):
        raise ValueError(f"elevation must lie in [0, pi/2], got {elevation_rad!r}")
    return float(_doppler_scale(cfg) * _cos_elevation(elevation_rad))


def _cos_apparent(slant_range_m: float, elevation_rad: float, position_error_m: float) -> float:
    if slant_range_m <= 0:
        raise ValueError(f"slant range must be > 0, got {slant_range_m!r}")
    if position_error_m < 0:
        raise ValueError(f"position error must be >= 0, got {position_error_m!r}")
    return kernels.cos_apparent_elevation(slant_range_m, float(_cos_elevation(elevation_rad)), position_error_m)


def apparent_elevation(slant_range_m: float, elevation_rad: float, position_error_m: float) -> float:
    """Elevation the relay believes the satellite is at, given its position error."""
    if position_error_m == 0:
        return elevation_rad
    return math.acos(_cos_apparent(slant_range_m, elevation_rad, position_error_m))


def apparent_range(slant_range_m: float, elevation_rad: float, position_error_m: float) -> float:
    d, rb = slant_range_m, position_error_m
    return math.sqrt(d * d + rb * rb + 2.0 * rb * d * float(_cos_elevation(elevation_rad)))


def _check_residual_domain(cfg: ScenarioConfig, elevation_rad, position_error_m) -> None:
    el = np.asarray(elevation_rad, dtype=float)
    rb = np.asarray(position_error_m, dtype=float)
    # tiny slack so that radians(45) from a grid is not rejected by rounding
    lo = cfg.min_elevation_rad - 1e-12
    if el.size == 0 or rb.size == 0:
        raise ValueError("empty grid")
    if np.any(~np.isfinite(el)) or np.any(el < lo) or np.any(el > math.pi / 2):
        raise ValueError(
            f"elevation must lie in [{cfg.min_elevation_rad!r}, pi/2] (minimum elevation to zenith)")
    if np.any(~np.isfinite(rb)) or np.any(rb < 0):
        raise ValueError("position error must be finite and >= 0")


def residual_doppler(cfg: ScenarioConfig, elevation_rad: float, position_error_m: float) -> DopplerResult:
    """True, estimated and residual satellite Doppler at one (elevation, error) point."""
    _check_residual_domain(cfg, elevation_rad, position_error_m)
    scale = _doppler_scale(cfg)
    cos_true = float(_cos_elevation(elevation_rad))
    d = slant_range(cfg, elevation_rad)
    cos_est = kernels.cos_apparent_elevation(d, cos_true, position_error_m)
    true = scale * cos_true
    est = scale * cos_est
    return DopplerResult(cfg.carrier_hz, elevation_rad, position_error_m, true, est, abs(true - est))


@dataclass(frozen=True)
class ResidualSurface:
    """Row-major (elevation x position error) grid of Doppler values."""

    carrier_hz: float
    elevation_rad: np.ndarray
    position_error_m: np.ndarray
    true_doppler_hz: np.ndarray
    estimated_doppler_hz: np.ndarray
    residual_doppler_hz: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.residual_doppler_hz.shape

    def __getitem__(self, idx) -> DopplerResult:
        i, j = idx
        return DopplerResult(
            self.carrier_hz, float(self.elevation_rad[i]), float(self.position_error_m[j]),
            float(self.true_doppler_hz[i, j]), float(self.estimated_doppler_hz[i, j]),
            float(self.residual_doppler_hz[i, j]))

    def results(self) -> list[DopplerResult]:
        """Flattened row-major list of :class:`DopplerResult`."""
        rows, cols = self.shape
        return [self[i, j] for i in range(rows) for j in range(cols)]


def residual_doppler_surface(cfg: ScenarioConfig, elevation_grid, error_grid) -> ResidualSurface:
    el = np.atleast_1d(np.asarray(elevation_grid, dtype=np.float64))
    rb = np.atleast_1d(np.asarray(error_grid, dtype=np.float64))
    _check_residual_domain(cfg, el, rb)
    d = np.array([slant_range(cfg, float(e)) for e in el])
    true, est, res = kernels.residual_surface(_doppler_scale(cfg), _cos_elevation(el), d, rb)
    return ResidualSurface(cfg.carrier_hz, el, rb, true, est, res)
