"""Timing-budget checks for contention-based random access over the satellite link.

Two stages are checked. In UE random access, a UE attaches to its relay and
only contention resolution crosses the satellite. In relay attach, the relay
attaches to the donor, so every step crosses the satellite. Timer budgets use
strict ``>``. The preamble guard budget uses ``<=``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .scenario import PhysicalConstants

__all__ = [
    "PreambleFormat",
    "RaTimers",
    "Violation",
    "RaVerdict",
    "LTE_PREAMBLE_FORMATS",
    "LTE_TIMERS",
    "largest_preamble",
    "timing_advance",
    "check_ue_ra",
    "check_rn_attach",
    "required_rar_window",
    "rar_window_for_option",
    "gnss_assisted_ta",
]

_C = PhysicalConstants().light_speed_ms


@dataclass(frozen=True)
class PreambleFormat:
    name: str
    cp_duration_s: float
    sequence_duration_s: float
    guard_time_s: float
    max_cell_radius_m: float

    def __post_init__(self):
        if min(self.cp_duration_s, self.sequence_duration_s, self.guard_time_s) < 0:
            raise ValueError("preamble durations must be >= 0")
        expected = self.guard_time_s * _C / 2.0
        if abs(self.max_cell_radius_m - expected) > 1e-9 * max(1.0, expected):
            raise ValueError(
                f"max_cell_radius_m {self.max_cell_radius_m!r} inconsistent with guard time "
                f"(expected {expected!r})")

    @classmethod
    def from_guard_time(cls, name, cp_s, seq_s, guard_s):
        return cls(name, cp_s, seq_s, guard_s, guard_s * _C / 2.0)

    @classmethod
    def from_radius(cls, name, cp_s, seq_s, radius_m):
        """Build a format whose guard time exactly covers ``radius_m``."""
        return cls(name, cp_s, seq_s, 2.0 * radius_m / _C, float(radius_m))


_TS = 1.0 / 30.72e6  # LTE basic time unit

# Formats 0-2 use the LTE guard times and are placeholders, not golden values.
# Format 3 is pinned to the 100 km / 0.67 ms design radius.
LTE_PREAMBLE_FORMATS = (
    PreambleFormat.from_guard_time("lte-0", 3168 * _TS, 24576 * _TS, 2976 * _TS),
    PreambleFormat.from_guard_time("lte-1", 21024 * _TS, 24576 * _TS, 15840 * _TS),
    PreambleFormat.from_guard_time("lte-2", 6240 * _TS, 2 * 24576 * _TS, 6048 * _TS),
    PreambleFormat.from_radius("lte-3", 21024 * _TS, 2 * 24576 * _TS, 100e3),
)


def largest_preamble(formats=LTE_PREAMBLE_FORMATS) -> PreambleFormat:
    return max(formats, key=lambda f: f.max_cell_radius_m)


@dataclass(frozen=True)
class RaTimers:
    rar_window_s: float
    contention_timer_s: float

    def __post_init__(self):
        if not (self.rar_window_s > 0 and self.contention_timer_s > 0):
            raise ValueError("RA timers must be > 0")


LTE_TIMERS = RaTimers(rar_window_s=15e-3, contention_timer_s=64e-3)


@dataclass(frozen=True)
class Violation:
    budget: str
    required_s: float
    available_s: float


@dataclass(frozen=True)
class RaVerdict:
    stage: str
    feasible: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.feasible != (not self.violations):
            raise ValueError("feasible must be True exactly when there are no violations")

    @property
    def violated(self) -> frozenset[str]:
        return frozenset(v.budget for v in self.violations)


def timing_advance(differential_distance_m: float, light_speed_ms: float = _C) -> float:
    """Round-trip timing advance for a path-length difference."""
    if differential_distance_m < 0:
        raise ValueError(f"distance must be >= 0, got {differential_distance_m!r}")
    return 2.0 * differential_distance_m / light_speed_ms


def _verdict(stage, violations):
    return RaVerdict(stage, not violations, tuple(violations))


def check_ue_ra(timers: RaTimers, satellite_rtt_s: float) -> RaVerdict:
    # preamble and RAR end at the relay; only contention resolution crosses the satellite
    violations = []
    if not timers.contention_timer_s > satellite_rtt_s:
        violations.append(Violation("contention_timer", satellite_rtt_s, timers.contention_timer_s))
    return _verdict("ue_ra", violations)


def check_rn_attach(timers: RaTimers, satellite_rtt_s: float, preamble: PreambleFormat,
                    differential_distance_m: float) -> RaVerdict:
    """Relay attach: RAR window, contention timer and preamble TA budget must all hold."""
    violations = []
    if not timers.rar_window_s > satellite_rtt_s:
        violations.append(Violation("rar_window", satellite_rtt_s, timers.rar_window_s))
    if not timers.contention_timer_s > satellite_rtt_s:
        violations.append(Violation("contention_timer", satellite_rtt_s, timers.contention_timer_s))
    if not differential_distance_m <= preamble.max_cell_radius_m:
        violations.append(Violation("timing_advance", timing_advance(differential_distance_m),
                                    timing_advance(preamble.max_cell_radius_m)))
    return _verdict("rn_attach", violations)


def required_rar_window(satellite_rtt_s: float, margin_s: float = 0.0) -> float:
    if margin_s < 0:
        raise ValueError(f"margin must be >= 0, got {margin_s!r}")
    return satellite_rtt_s + margin_s


def rar_window_for_option(option: str, terrestrial_window_s: float, satellite_rtt_s: float,
                          worst_case_rtt_s: float | None = None, *,
                          satellite_link: bool = True, margin_s: float = 0.0) -> float:
    """RAR window a relay would use under a mitigation option.

    ``"none"`` keeps the terrestrial window. ``"fixed"`` sizes one window for
    the worst-case RTT everywhere. ``"signalled"`` uses the satellite-sized
    window only when the one-bit satellite indicator (``satellite_link``) is
    set.
    """
    if option == "none":
        return terrestrial_window_s
    if option == "fixed":
        worst = satellite_rtt_s if worst_case_rtt_s is None else worst_case_rtt_s
        # timer checks are strict, so a zero-margin window is nudged one ulp up
        return _strictly_above(required_rar_window(worst, margin_s))
    if option == "signalled":
        if satellite_link:
            return _strictly_above(required_rar_window(satellite_rtt_s, margin_s))
        return terrestrial_window_s
    raise ValueError(f"unknown RAR window option {option!r}")


def _strictly_above(x: float) -> float:
    return math.nextafter(x, math.inf)


def gnss_assisted_ta(differential_distance_m: float, position_error_m: float,
                     preamble: PreambleFormat) -> tuple[float, bool]:
    """Residual TA left after GNSS pre-compensation, and whether the preamble absorbs it.

    The relay removes its estimated distance before sending the preamble,
    so the remaining uncertainty is bounded by the position error itself.
    """
    if differential_distance_m < 0 or position_error_m < 0:
        raise ValueError("distances must be >= 0")
    return timing_advance(position_error_m), position_error_m <= preamble.max_cell_radius_m
