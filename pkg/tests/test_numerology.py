import math

import numpy as np
import pytest

from leo_ntn import numerology as nm
from leo_ntn.impairments import residual_doppler
from leo_ntn.scenario import ScenarioConfig

ZENITH = math.pi / 2


@pytest.mark.parametrize("n, scs", [(0, 15e3), (2, 60e3), (5, 480e3)])
def test_scs_grid(n, scs):
    assert nm.scs_from_index(n) == scs


def test_scs_negative_index():
    with pytest.raises(ValueError):
        nm.scs_from_index(-1)


@pytest.mark.parametrize("scs, expected, rounded", [
    (15e3, 945.0, 0.95e3), (30e3, 1890.0, 1.9e3), (120e3, 7560.0, 7.6e3)])
def test_tolerated_doppler(scs, expected, rounded):
    assert nm.tolerated_doppler(scs) == pytest.approx(expected, rel=1e-12)
    assert nm.tolerated_doppler(scs) == pytest.approx(rounded, rel=0.01)


def test_largest_scs_tolerance_is_30_24_khz():
    # quoted elsewhere as 30.4 kHz; 6.3 % of 480 kHz is 30.24 kHz
    assert nm.tolerated_doppler(480e3) == pytest.approx(30.24e3, rel=1e-12)


def test_ratio_is_overridable():
    assert nm.tolerated_doppler(15e3, ratio=0.1) == pytest.approx(1.5e3)


@pytest.mark.parametrize("scs, expected", [(15e3, 3.95e3), (60e3, 15.8e3)])
def test_max_position_error_table(cfg, scs, expected):
    assert nm.max_position_error(cfg, scs) == pytest.approx(expected, rel=0.03)


def test_bisection_quantum(cfg):
    for entry in nm.numerology_table(cfg, range(6)):
        r = entry.max_position_error_m
        tol = entry.tolerated_doppler_hz
        assert r == int(r) and r > 0
        assert residual_doppler(cfg, ZENITH, r).residual_doppler_hz <= tol
        assert residual_doppler(cfg, ZENITH, r + 1).residual_doppler_hz > tol


def test_doubling_scs_doubles_error_in_small_error_regime(cfg):
    # dense sweep: residual/error ratio is nearly flat up to 16 km at zenith
    rb = np.arange(1.0, 16e3, 50.0)
    slope = np.array([residual_doppler(cfg, ZENITH, float(x)).residual_doppler_hz / x for x in rb])
    assert slope.max() / slope.min() - 1 < 5e-3
    for scs in (15e3, 30e3, 60e3):
        a = nm.max_position_error(cfg, scs)
        b = nm.max_position_error(cfg, 2 * scs)
        assert b / a == pytest.approx(2.0, rel=5e-3)


def test_max_position_error_increasing_in_scs(cfg):
    errs = [e.max_position_error_m for e in nm.numerology_table(cfg, range(6))]
    assert all(a < b for a, b in zip(errs, errs[1:]))


def test_unbounded_tolerance_rejected(cfg):
    with pytest.raises(ValueError, match="unbounded"):
        nm.max_position_error(cfg, 15e3 * 2 ** 10)


def test_selection():
    grid = nm.numerology_table(ScenarioConfig(), range(6))
    assert nm.select_numerology(1.9e3 * 0.99, grid).scs_hz == 30e3
    assert nm.select_numerology(1.89e3, grid).scs_hz == 30e3
    assert nm.select_numerology(0.0, grid).scs_hz == 15e3
    with pytest.raises(ValueError, match="no numerology satisfies requirement"):
        nm.select_numerology(31e3, grid)
    with pytest.raises(ValueError):
        nm.select_numerology(1.0, [])


def test_selection_fixed_point():
    grid = nm.numerology_table(ScenarioConfig(), range(6))
    for entry in grid:
        assert nm.select_numerology(nm.tolerated_doppler(entry.scs_hz), grid) == entry
