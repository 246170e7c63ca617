import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from leo_ntn import impairments as imp
from leo_ntn.geometry import slant_range
from leo_ntn.scenario import ScenarioConfig

from conftest import DEG45, ZENITH


class TestDelay:
    def test_default_rtt(self, cfg):
        b = imp.round_trip_time(cfg)
        assert b.round_trip_s == pytest.approx(16.01e-3, abs=0.01e-3)
        assert b.round_trip_s == 2 * b.one_way_s
        assert sum(s for _, s in b.components) == b.round_trip_s
        assert [name for name, _ in b.components] == ["rn_satellite", "satellite_dgnb"]

    def test_zero_altitude(self):
        assert imp.delay_budget(0.0).round_trip_s == 0.0

    def test_feeder_delay_is_linear(self, cfg):
        base = imp.round_trip_time(cfg).round_trip_s
        more = imp.round_trip_time(ScenarioConfig(feeder_extra_delay_s=1e-3)).round_trip_s
        assert more - base == pytest.approx(2e-3, abs=1e-15)

    @given(st.floats(0, 1e8), st.floats(0, 1.0))
    def test_components_sum_exactly(self, h, extra):
        b = imp.delay_budget(h, extra)
        assert sum(s for _, s in b.components) == b.round_trip_s
        assert b.round_trip_s == 2 * b.one_way_s


class TestDoppler:
    def test_ue_doppler_mobility_target(self):
        f = imp.ue_doppler(500 / 3.6, 4e9, 0.0)
        assert f == pytest.approx(1852, rel=1e-3)
        assert f == pytest.approx(1.9e3, rel=0.03)

    def test_ue_doppler_zero_cases(self):
        assert imp.ue_doppler(100.0, 4e9, math.pi / 2) == pytest.approx(0.0, abs=1e-9)
        assert imp.ue_doppler(0.0, 4e9, 0.0) == 0.0
        with pytest.raises(ValueError):
            imp.ue_doppler(-1.0, 4e9, 0.0)

    def test_sat_doppler_zenith(self, cfg):
        assert imp.sat_doppler(cfg, ZENITH) == 0.0

    @pytest.mark.parametrize("carrier, expected", [(14e9, 201.6e3), (11e9, 158.4e3)])
    def test_sat_doppler_ku_band(self, carrier, expected):
        cfg = ScenarioConfig(carrier_hz=carrier)
        w = math.sqrt(3.986004418e14 / 7.571e6 ** 3)
        direct = carrier * w * 6.371e6 * math.cos(DEG45) / 2.99792458e8
        assert imp.sat_doppler(cfg, DEG45) == pytest.approx(direct, rel=1e-12)
        assert imp.sat_doppler(cfg, DEG45) == pytest.approx(expected, rel=1e-3)

    def test_sat_doppler_domain(self, cfg):
        for bad in (-1e-3, ZENITH + 1e-6):
            with pytest.raises(ValueError):
                imp.sat_doppler(cfg, bad)

    def test_sat_doppler_decreasing(self, cfg):
        vals = [imp.sat_doppler(cfg, float(e)) for e in np.radians(np.linspace(0, 90, 901))]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestApparentElevation:
    def test_no_error_is_identity(self):
        assert imp.apparent_elevation(1.3e6, 0.9, 0.0) == 0.9

    def test_zenith_symmetric_triangle(self):
        d = 1.2e6
        assert imp.apparent_elevation(d, ZENITH, d) == pytest.approx(math.pi / 4, abs=1e-12)

    @pytest.mark.parametrize("deg, rb", [(45, 1e3), (60, 25e3), (90, 50e3), (75, 3.95e3)])
    def test_substitute_back(self, deg, rb):
        el = math.radians(deg)
        d = 1.35e6
        el_e = imp.apparent_elevation(d, el, rb)
        d_e = imp.apparent_range(d, el, rb)
        # projected distance shifted by the error
        assert d_e * math.cos(el_e) == pytest.approx(d * math.cos(el) + rb, rel=1e-9)
        # law of cosines back to the true range
        assert d_e ** 2 + rb ** 2 - 2 * rb * d_e * math.cos(el_e) == pytest.approx(d ** 2, rel=1e-9)


class TestResidual:
    def test_zero_error_zero_residual(self, cfg):
        for el in np.radians(np.linspace(45, 90, 91)):
            r = imp.residual_doppler(cfg, float(el), 0.0)
            assert r.residual_doppler_hz <= 1e-9 * max(1.0, r.true_doppler_hz)
            assert r.residual_doppler_hz == abs(r.true_doppler_hz - r.estimated_doppler_hz)

    @pytest.mark.parametrize("rb, expected", [(3.95e3, 0.95e3), (7.9e3, 1.9e3)])
    def test_zenith_table_points(self, cfg, rb, expected):
        assert imp.residual_doppler(cfg, ZENITH, rb).residual_doppler_hz == pytest.approx(expected, rel=0.03)

    def test_domain(self, cfg):
        with pytest.raises(ValueError):
            imp.residual_doppler(cfg, math.radians(30), 1e3)
        with pytest.raises(ValueError):
            imp.residual_doppler(cfg, ZENITH, -1.0)

    def test_strictly_increasing_in_error_at_zenith(self, cfg):
        vals = [imp.residual_doppler(cfg, ZENITH, float(rb)).residual_doppler_hz
                for rb in np.arange(0, 50e3 + 1, 1e3)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_estimated_uses_slant_range(self, cfg):
        el = math.radians(60)
        r = imp.residual_doppler(cfg, el, 10e3)
        el_e = imp.apparent_elevation(slant_range(cfg, el), el, 10e3)
        assert r.estimated_doppler_hz == pytest.approx(imp.sat_doppler(cfg, el_e), rel=1e-9)


class TestSurface:
    def test_single_cell(self, cfg):
        surf = imp.residual_doppler_surface(cfg, [ZENITH], [5e3])
        assert surf.shape == (1, 1)
        assert surf.results()[0].residual_doppler_hz == pytest.approx(
            imp.residual_doppler(cfg, ZENITH, 5e3).residual_doppler_hz, rel=1e-12)

    def test_full_grid_matches_pointwise(self, cfg):
        el = np.radians(np.arange(45, 91, 1.0))
        rb = np.arange(0, 50e3 + 1, 1e3)
        surf = imp.residual_doppler_surface(cfg, el, rb)
        assert surf.shape == (el.size, rb.size)
        flat = surf.results()
        for k, res in enumerate(flat):
            i, j = divmod(k, rb.size)
            ref = imp.residual_doppler(cfg, float(el[i]), float(rb[j]))
            assert res.elevation_rad == ref.elevation_rad
            assert res.position_error_m == ref.position_error_m
            assert res.residual_doppler_hz == pytest.approx(ref.residual_doppler_hz, rel=1e-12, abs=1e-9)
            assert res.true_doppler_hz == pytest.approx(ref.true_doppler_hz, rel=1e-12, abs=1e-9)

    def test_argmax_at_zenith(self, cfg):
        el = np.radians(np.arange(45, 91, 1.0))
        rb = np.arange(1e3, 50e3 + 1, 1e3)
        surf = imp.residual_doppler_surface(cfg, el, rb)
        assert np.all(np.argmax(surf.residual_doppler_hz, axis=0) == el.size - 1)
        col = list(rb).index(10e3)
        assert np.argmax(surf.residual_doppler_hz[:, col]) == el.size - 1

    def test_empty_grid_rejected(self, cfg):
        with pytest.raises(ValueError):
            imp.residual_doppler_surface(cfg, [], [1.0])
