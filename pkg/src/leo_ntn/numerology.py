"""NR subcarrier-spacing grid and how much GNSS position error each SCS tolerates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .impairments import residual_doppler
from .scenario import ScenarioConfig

__all__ = [
    "DOPPLER_TOLERANCE_RATIO",
    "NumerologyEntry",
    "scs_from_index",
    "tolerated_doppler",
    "max_position_error",
    "numerology_table",
    "select_numerology",
]

# LTE: 950 Hz of 15 kHz; assumed to scale linearly with SCS
DOPPLER_TOLERANCE_RATIO = 0.063

BASE_SCS_HZ = 15e3
ZENITH = math.pi / 2


@dataclass(frozen=True)
class NumerologyEntry:
    index_n: int
    scs_hz: float
    tolerated_doppler_hz: float
    max_position_error_m: float


def scs_from_index(n: int) -> float:
    if n < 0 or int(n) != n:
        raise ValueError(f"numerology index must be a non-negative integer, got {n!r}")
    return BASE_SCS_HZ * 2 ** int(n)


def tolerated_doppler(scs_hz: float, ratio: float = DOPPLER_TOLERANCE_RATIO) -> float:
    if not scs_hz > 0:
        raise ValueError(f"SCS must be > 0, got {scs_hz!r}")
    return ratio * scs_hz


def _residual_at_zenith(cfg: ScenarioConfig, error_m: float) -> float:
    return residual_doppler(cfg, ZENITH, float(error_m)).residual_doppler_hz


def max_position_error(cfg: ScenarioConfig, scs_hz: float,
                       ratio: float = DOPPLER_TOLERANCE_RATIO) -> float:
    """Largest whole-meter position error whose zenith residual Doppler fits the SCS tolerance.

    Zenith is the worst elevation for a fixed error. Integer bisection, so the
    answer ``r`` satisfies ``residual(r) <= tol < residual(r + 1)``.
    """
    tol = tolerated_doppler(scs_hz, ratio)
    if _residual_at_zenith(cfg, 0.0) > tol:
        raise ValueError("tolerance is exceeded even with a perfect position estimate")
    lo, hi = 0, 1
    while _residual_at_zenith(cfg, hi) <= tol:
        lo, hi = hi, hi * 2
        if hi > 1e12:
            raise ValueError(
                f"tolerance {tol:.6g} Hz is never exceeded; position error is unbounded")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _residual_at_zenith(cfg, mid) <= tol:
            lo = mid
        else:
            hi = mid
    return float(lo)


def numerology_table(cfg: ScenarioConfig, indices: Sequence[int] = range(4),
                     ratio: float = DOPPLER_TOLERANCE_RATIO) -> list[NumerologyEntry]:
    """Rows of (SCS, tolerated Doppler, max position error), sorted by SCS."""
    rows = []
    for n in sorted(indices):
        scs = scs_from_index(n)
        rows.append(NumerologyEntry(n, scs, tolerated_doppler(scs, ratio),
                                    max_position_error(cfg, scs, ratio)))
    return rows


def select_numerology(required_doppler_hz: float,
                      available: Sequence[NumerologyEntry]) -> NumerologyEntry:
    """Smallest SCS whose tolerance covers ``required_doppler_hz``."""
    if not available:
        raise ValueError("no numerology entries to choose from")
    for entry in sorted(available, key=lambda e: e.scs_hz):
        if entry.tolerated_doppler_hz >= required_doppler_hz:
            return entry
    largest = max(available, key=lambda e: e.scs_hz)
    raise ValueError(
        f"no numerology satisfies requirement: {required_doppler_hz:.6g} Hz > "
        f"{largest.tolerated_doppler_hz:.6g} Hz tolerated at SCS {largest.scs_hz:.6g} Hz")
