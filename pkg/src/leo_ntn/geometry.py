"""Spherical-Earth geometry between a circular-orbit satellite and ground relays.

Every function takes a :class:`~leo_ntn.scenario.ScenarioConfig` for the
radii and constants. Angles are radians, distances meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import ScenarioConfig

__all__ = [
    "GeometrySolution",
    "DifferentialGeometry",
    "angular_velocity",
    "ground_track_speed",
    "slant_range",
    "central_angle",
    "elevation_from_central_angle",
    "solve_geometry",
    "differential_distance",
    "visibility_pass_duration",
]


@dataclass(frozen=True)
class GeometrySolution:
    slant_range_m: float
    elevation_rad: float
    ground_arc_m: float


@dataclass(frozen=True)
class DifferentialGeometry:
    d1_m: float
    d2_m: float
    differential_m: float
    arc1_m: float
    arc2_m: float


def angular_velocity(cfg: ScenarioConfig) -> float:
    """Orbital angular rate sqrt(mu / (R_E + h)^3) in rad/s."""
    return math.sqrt(cfg.constants.earth_mu_m3s2 / cfg.orbit_radius_m ** 3)


def ground_track_speed(cfg: ScenarioConfig) -> float:
    """Sub-satellite point speed over a non-rotating Earth, m/s."""
    return angular_velocity(cfg) * cfg.constants.earth_radius_m


def _check_elevation(elevation: float) -> None:
    if not (0.0 < elevation <= math.pi / 2):
        raise ValueError(f"elevation must lie in (0, pi/2], got {elevation!r}")


def slant_range(cfg: ScenarioConfig, elevation: float) -> float:
    """Ground-terminal to satellite distance at the given elevation.

    Positive root of ``d**2 + 2 R_E sin(el) d - h (2 R_E + h) = 0``, written
    in the cancellation-free form ``c / (b + sqrt(b**2 + c))``.
    """
    _check_elevation(elevation)
    r_e = cfg.constants.earth_radius_m
    h = cfg.altitude_m
    b = r_e * math.sin(elevation)
    c = h * (2.0 * r_e + h)
    return c / (b + math.sqrt(b * b + c))


def central_angle(cfg: ScenarioConfig, elevation: float) -> float:
    """Earth-central angle between terminal and sub-satellite point."""
    if not (0.0 <= elevation <= math.pi / 2):
        raise ValueError(f"elevation must lie in [0, pi/2], got {elevation!r}")
    ratio = cfg.constants.earth_radius_m / cfg.orbit_radius_m
    nadir = math.asin(ratio * math.cos(elevation))
    return max(0.0, math.pi / 2 - elevation - nadir)


def elevation_from_central_angle(cfg: ScenarioConfig, psi: float) -> GeometrySolution:
    r_e = cfg.constants.earth_radius_m
    r = cfg.orbit_radius_m
    d = math.sqrt(r_e * r_e + r * r - 2.0 * r_e * r * math.cos(psi))
    sin_el = (r * math.cos(psi) - r_e) / d
    return GeometrySolution(d, math.asin(max(-1.0, min(1.0, sin_el))), r_e * psi)


def solve_geometry(cfg: ScenarioConfig, elevation: float) -> GeometrySolution:
    d = slant_range(cfg, elevation)
    return GeometrySolution(d, elevation, cfg.constants.earth_radius_m * central_angle(cfg, elevation))


def differential_distance(cfg: ScenarioConfig, beam_diameter_m: float | None = None) -> DifferentialGeometry:
    """Slant ranges of two relays one beam apart at the edge of coverage.

    RN1 sits at the minimum elevation. RN2 is one beam diameter closer to
    the sub-satellite point along the same great circle.
    """
    beam = cfg.beam_diameter_m if beam_diameter_m is None else beam_diameter_m
    if beam < 0:
        raise ValueError(f"beam diameter must be >= 0, got {beam!r}")
    r_e = cfg.constants.earth_radius_m
    d1 = slant_range(cfg, cfg.min_elevation_rad)
    arc1 = r_e * central_angle(cfg, cfg.min_elevation_rad)
    arc2 = arc1 - beam
    if arc2 < 0:
        raise ValueError(
            f"beam diameter {beam:.6g} m exceeds the ground arc {arc1:.6g} m of the edge relay")
    if beam == 0:
        d2 = d1
    else:
        d2 = elevation_from_central_angle(cfg, arc2 / r_e).slant_range_m
    return DifferentialGeometry(d1, d2, d1 - d2, arc1, arc2)


def visibility_pass_duration(cfg: ScenarioConfig) -> float:
    """Time an overhead pass keeps a fixed terminal above the elevation mask."""
    return 2.0 * central_angle(cfg, cfg.min_elevation_rad) / angular_velocity(cfg)
