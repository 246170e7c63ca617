import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from leo_ntn import geometry
from leo_ntn.scenario import ScenarioConfig

from conftest import DEG45, ZENITH


def test_angular_velocity_direct(cfg):
    expected = math.sqrt(3.986004418e14 / (6.371e6 + 1.2e6) ** 3)
    assert geometry.angular_velocity(cfg) == pytest.approx(expected, rel=1e-15)
    assert geometry.angular_velocity(cfg) == pytest.approx(9.584e-4, rel=1e-3)
    assert geometry.ground_track_speed(cfg) == pytest.approx(6.106e3, rel=1e-3)


def test_angular_velocity_decreases_with_altitude():
    rates = [geometry.angular_velocity(ScenarioConfig(altitude_m=h)) for h in np.geomspace(1e5, 1e12, 40)]
    assert all(a > b for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1e-10


def test_slant_range_nadir_is_altitude(cfg):
    assert geometry.slant_range(cfg, ZENITH) == 1.2e6


def test_slant_range_minimum_elevation(cfg):
    assert geometry.slant_range(cfg, DEG45) == pytest.approx(1580e3, abs=2e3)


@pytest.mark.parametrize("deg", [5, 20, 45, 60, 89.9])
def test_slant_range_satisfies_quadratic(cfg, deg):
    el = math.radians(deg)
    d = geometry.slant_range(cfg, el)
    r_e, h = 6.371e6, 1.2e6
    lhs = (r_e + h) ** 2 - r_e ** 2 - d ** 2
    rhs = 2 * r_e * d * math.sin(el)
    assert abs(lhs - rhs) <= 1e-6 * rhs


@pytest.mark.parametrize("bad", [0.0, -0.1, math.pi / 2 + 1e-9, math.nan])
def test_slant_range_domain(cfg, bad):
    with pytest.raises(ValueError):
        geometry.slant_range(cfg, bad)


def test_slant_range_strictly_decreasing(cfg):
    els = np.radians(np.linspace(0.01, 90, 2000))
    d = [geometry.slant_range(cfg, float(e)) for e in els]
    assert all(a > b for a, b in zip(d, d[1:]))
    horizon = math.sqrt((6.371e6 + 1.2e6) ** 2 - 6.371e6 ** 2)
    assert all(1.2e6 <= x <= horizon for x in d)


@given(st.floats(min_value=1e-6, max_value=math.pi / 2))
def test_slant_range_bounds(el):
    cfg = ScenarioConfig()
    horizon = math.sqrt(cfg.orbit_radius_m ** 2 - 6.371e6 ** 2)
    assert 1.2e6 <= geometry.slant_range(cfg, el) <= horizon


# --- independent oracle: place points as 2-D vectors in the orbital plane ---

def _vector_oracle(cfg, beam):
    r_e, r = cfg.constants.earth_radius_m, cfg.orbit_radius_m
    sat = np.array([0.0, r])

    def ground(psi):
        return np.array([r_e * math.sin(psi), r_e * math.cos(psi)])

    def elevation(psi):
        g = ground(psi)
        los = sat - g
        up = g / np.linalg.norm(g)
        return math.asin(np.dot(los, up) / np.linalg.norm(los))

    lo, hi = 0.0, math.acos(r_e / r)  # zenith .. horizon
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if elevation(mid) > cfg.min_elevation_rad:
            lo = mid
        else:
            hi = mid
    psi1 = 0.5 * (lo + hi)
    psi2 = psi1 - beam / r_e
    d1 = np.linalg.norm(sat - ground(psi1))
    d2 = np.linalg.norm(sat - ground(psi2))
    return d1, d2


def test_differential_distance_defaults(cfg):
    sol = geometry.differential_distance(cfg)
    assert sol.d1_m == pytest.approx(1580e3, abs=2e3)
    assert sol.d2_m == pytest.approx(1372e3, abs=10e3)
    assert sol.differential_m == pytest.approx(208e3, abs=10e3)
    assert sol.differential_m == sol.d1_m - sol.d2_m
    assert sol.d1_m >= sol.d2_m


@pytest.mark.parametrize("beam", [1e3, 50e3, 320e3, 900e3])
def test_differential_matches_vector_oracle(cfg, beam):
    sol = geometry.differential_distance(cfg, beam)
    d1, d2 = _vector_oracle(cfg, beam)
    assert sol.d1_m == pytest.approx(d1, rel=1e-9)
    assert sol.d2_m == pytest.approx(d2, rel=1e-9)


def test_zero_beam_no_differential(cfg):
    assert geometry.differential_distance(cfg, 0.0).differential_m == 0.0


def test_beam_wider_than_arc_fails(cfg):
    with pytest.raises(ValueError, match="exceeds the ground arc"):
        geometry.differential_distance(cfg, 2e6)


def test_differential_increasing_in_beam(cfg):
    beams = np.linspace(0, 940e3, 200)
    diffs = [geometry.differential_distance(cfg, float(b)).differential_m for b in beams]
    assert all(a < b for a, b in zip(diffs, diffs[1:]))


def test_elevation_from_central_angle_inverts(cfg):
    for deg in (45, 60, 80):
        el = math.radians(deg)
        sol = geometry.elevation_from_central_angle(cfg, geometry.central_angle(cfg, el))
        assert sol.elevation_rad == pytest.approx(el, abs=1e-12)
        assert sol.slant_range_m == pytest.approx(geometry.slant_range(cfg, el), rel=1e-12)


def test_pass_duration_zero_cone():
    assert geometry.visibility_pass_duration(ScenarioConfig(min_elevation_rad=ZENITH)) == 0.0


def test_pass_duration_time_stepping_oracle(cfg):
    r_e, r = cfg.constants.earth_radius_m, cfg.orbit_radius_m
    w = math.sqrt(cfg.constants.earth_mu_m3s2 / r ** 3)
    t = np.arange(-400.0, 400.0, 1e-3)
    sat = np.stack([r * np.sin(w * t), r * np.cos(w * t)])
    ground = np.array([[0.0], [r_e]])
    los = sat - ground
    sin_el = los[1] / np.linalg.norm(los, axis=0)
    visible = np.count_nonzero(sin_el >= math.sin(cfg.min_elevation_rad)) * 1e-3
    assert geometry.visibility_pass_duration(cfg) == pytest.approx(visible, rel=1e-2)


def test_pass_duration_decreasing_in_mask():
    masks = np.radians(np.linspace(45, 89.9, 100))
    durs = [geometry.visibility_pass_duration(ScenarioConfig(min_elevation_rad=float(m))) for m in masks]
    assert all(a > b for a, b in zip(durs, durs[1:]))
