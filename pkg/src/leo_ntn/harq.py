"""HARQ dimensioning and a seeded simulator of parallel stop-and-wait HARQ.

The simulator is slot-synchronous: a process may send one TB per TTI slot,
and becomes free again ``tti + harq_cycle_time`` after the start of its
transmission. With an always-backlogged source and N processes, the link is
therefore busy ``min(1, N * TTI / (T_HARQ + TTI))`` of the time.

Strategies
----------
``full`` / ``capped``
    1-bit ACK/NACK. ``capped`` is the same machine, but it only accepts
    fewer processes than the cycle needs.
``multibit``
    2-bit feedback. A NACK carries one of four decoding-margin levels, drawn
    from ``level_weights``. The level picks the success-probability row used
    for the retransmission.
``replication``
    No feedback. Each TB is sent ``replication_factor`` times back to back
    and succeeds if any copy decodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels

__all__ = [
    "STRATEGIES",
    "HarqConfig",
    "HarqReport",
    "harq_cycle_time",
    "min_processes",
    "buffer_requirement",
    "dci_process_field_width",
    "theoretical_utilization",
    "simulate",
]

STRATEGIES = ("full", "multibit", "capped", "replication")
_STRATEGY_CODE = {"full": kernels.FULL, "multibit": kernels.MULTIBIT,
                  "capped": kernels.CAPPED, "replication": kernels.REPLICATION}

TICKS_PER_S = 1_000_000_000


def _ticks(seconds: float) -> int:
    return int(round(seconds * TICKS_PER_S))


@dataclass(frozen=True)
class HarqConfig:
    """Parameters of one HARQ study.

    ``success_prob[a]`` is the probability that transmission ``a + 1`` of a
    TB decodes. If there are more attempts than entries, the last entry is
    reused. ``level_success_prob`` (multibit only) holds four such rows, one
    per feedback level.
    """

    tti_s: float = 1e-3
    proc_rx_s: float = 4e-3
    proc_tx_s: float = 4e-3
    ack_duration_s: float = 0.0
    propagation_s: float = 8e-3
    num_processes: int = 24
    feedback_bits: int = 1
    max_transmissions: int = 4
    strategy: str = "full"
    replication_factor: int = 1
    success_prob: tuple[float, ...] = (1.0,)
    level_success_prob: tuple[tuple[float, ...], ...] | None = None
    level_weights: tuple[float, ...] = (0.25, 0.25, 0.25, 0.25)
    link_rate_bps: float = 100e6
    seed: int = 0

    def __post_init__(self):
        durations = (self.tti_s, self.proc_rx_s, self.proc_tx_s,
                     self.ack_duration_s, self.propagation_s)
        if any(not math.isfinite(d) or d < 0 for d in durations):
            raise ValueError("HARQ durations must be finite and >= 0")
        if not self.tti_s > 0:
            raise ValueError("tti_s must be > 0")
        if self.num_processes < 1:
            raise ValueError("num_processes must be >= 1")
        if self.feedback_bits not in (1, 2):
            raise ValueError("feedback_bits must be 1 or 2")
        if self.max_transmissions < 1:
            raise ValueError("max_transmissions must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.replication_factor < 1:
            raise ValueError("replication_factor must be >= 1")
        if not self.success_prob:
            raise ValueError("success_prob needs at least one entry")
        probs = list(self.success_prob)
        if self.level_success_prob is not None:
            if len(self.level_success_prob) != 4:
                raise ValueError("level_success_prob needs exactly four rows")
            for row in self.level_success_prob:
                if not row:
                    raise ValueError("level_success_prob rows must be non-empty")
                probs.extend(row)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        if len(self.level_weights) != 4 or any(w < 0 for w in self.level_weights) \
                or not math.isclose(sum(self.level_weights), 1.0, rel_tol=1e-9):
            raise ValueError("level_weights must be four non-negative numbers summing to 1")
        if not self.link_rate_bps >= 0:
            raise ValueError("link_rate_bps must be >= 0")


@dataclass(frozen=True)
class HarqReport:
    duration_s: float
    offered_tb: int
    delivered_tb: int
    dropped_tb: int
    utilization: float
    goodput_tb_per_s: float
    mean_latency_s: float
    p95_latency_s: float
    peak_soft_buffer_bits: float
    mean_transmissions: float
    retransmission_histogram: tuple[int, ...] = field(default_factory=tuple)

    @property
    def delivery_ratio(self) -> float:
        done = self.delivered_tb + self.dropped_tb
        return self.delivered_tb / done if done else math.nan


def harq_cycle_time(cfg: HarqConfig) -> float:
    """Time from the end of a TB until its process may transmit again."""
    return 2.0 * cfg.propagation_s + cfg.proc_rx_s + cfg.proc_tx_s + cfg.ack_duration_s


def min_processes(t_harq_s: float, tti_s: float) -> int:
    if not tti_s > 0:
        raise ValueError("tti must be > 0")
    # round away float noise such as 24.000000000000004 before taking the ceiling
    ratio = round(t_harq_s / tti_s, 9)
    return max(1, math.ceil(ratio))


def buffer_requirement(num_processes: int, tti_s: float, link_rate_bits_per_s: float) -> float:
    """Soft bits needed to hold one in-flight TB per process."""
    return num_processes * tti_s * link_rate_bits_per_s


def dci_process_field_width(num_processes: int) -> int:
    if num_processes < 1:
        raise ValueError("num_processes must be >= 1")
    return (num_processes - 1).bit_length()


def theoretical_utilization(num_processes: int, t_harq_s: float, tti_s: float) -> float:
    return min(1.0, num_processes * tti_s / (t_harq_s + tti_s))


def _check_against_strategy(cfg: HarqConfig, duration_s: float) -> None:
    t_harq = harq_cycle_time(cfg)
    if duration_s < 10.0 * (t_harq + cfg.tti_s):
        raise ValueError(
            f"duration {duration_s!r} s is shorter than 10 HARQ cycles ({10 * (t_harq + cfg.tti_s)!r} s)")
    if cfg.strategy == "multibit":
        if cfg.feedback_bits != 2:
            raise ValueError("multibit strategy needs feedback_bits = 2")
        if cfg.level_success_prob is None:
            raise ValueError("multibit strategy needs level_success_prob")
    elif cfg.strategy in ("full", "capped") and cfg.feedback_bits != 1:
        raise ValueError(f"{cfg.strategy} strategy uses 1-bit feedback, got feedback_bits = 2")
    if cfg.strategy == "capped":
        needed = min_processes(t_harq, cfg.tti_s)
        if cfg.num_processes >= needed:
            raise ValueError(
                f"capped strategy needs fewer than {needed} processes, got {cfg.num_processes}")
    if cfg.strategy != "replication" and cfg.replication_factor != 1:
        raise ValueError("replication_factor only applies to the replication strategy")


def _row(values, length):
    values = list(values)
    return values[:length] + [values[-1]] * max(0, length - len(values))


def _prob_table(cfg: HarqConfig) -> np.ndarray:
    m = cfg.max_transmissions
    base = _row(cfg.success_prob, m)
    levels = cfg.level_success_prob or (cfg.success_prob,) * 4
    return np.array([base] + [_row(r, m) for r in levels], dtype=np.float64)


def _peak_occupancy(acquire: np.ndarray, release: np.ndarray) -> int:
    if acquire.size == 0:
        return 0
    ticks = np.concatenate([acquire, release])
    delta = np.concatenate([np.ones_like(acquire), -np.ones_like(release)])
    order = np.lexsort((delta, ticks))  # releases before acquires at equal ticks
    return int(np.cumsum(delta[order]).max())


def simulate(cfg: HarqConfig, duration_s: float, log=None, *, use_numba: bool | None = None) -> HarqReport:
    """Run the HARQ machine for ``duration_s`` of new traffic, then drain.

    Only TBs first sent before ``duration_s`` are offered. Their
    retransmissions run to completion, so every offered TB ends up delivered
    or dropped. ``log`` may be a text stream, which receives one CSV line per
    event: ``time_s,process_id,event,attempt,outcome``.
    """
    _check_against_strategy(cfg, duration_s)
    tti = _ticks(cfg.tti_s)
    tp = _ticks(cfg.propagation_s)
    t1 = _ticks(cfg.proc_rx_s)
    t_harq = 2 * tp + t1 + _ticks(cfg.proc_tx_s) + _ticks(cfg.ack_duration_s)
    horizon = int(_ticks(duration_s) // tti)
    strategy = _STRATEGY_CODE[cfg.strategy]
    max_tx = cfg.replication_factor if cfg.strategy == "replication" else cfg.max_transmissions

    if cfg.strategy == "replication":
        n_slots = horizon + cfg.replication_factor + 1
    else:
        cycle_slots = -(-(tti + t_harq) // tti)
        n_slots = horizon + max_tx * (cycle_slots + cfg.num_processes + 2) + 2
    rng = np.random.default_rng(cfg.seed)
    draws = rng.random((2, n_slots))
    u_dec = np.ascontiguousarray(draws[0])
    u_lvl = np.ascontiguousarray(draws[1])
    level_cum = np.cumsum(np.asarray(cfg.level_weights, dtype=np.float64))
    level_cum[-1] = 1.0

    if use_numba is None:
        loop = kernels.harq_slot_loop
    else:
        loop = kernels.harq_slot_loop if use_numba and kernels.USE_NUMBA else kernels.harq_slot_loop_py
    tx, tb, counters = loop(strategy, cfg.num_processes, max_tx, cfg.replication_factor,
                            tti, t_harq, tp, t1, horizon, _prob_table(cfg), level_cum, u_dec, u_lvl)
    n_tx, n_tb, busy, overflow = (int(v) for v in counters)
    if overflow:
        raise RuntimeError("HARQ simulation exhausted its pre-drawn channel samples")

    delivered = tb[:, 3] == 1
    latency = (tb[delivered, 1] - tb[delivered, 0]) / TICKS_PER_S
    histogram = np.bincount(tb[:, 2], minlength=max_tx + 1)[1:]
    tb_bits = cfg.tti_s * cfg.link_rate_bps
    horizon_s = horizon * tti / TICKS_PER_S
    report = HarqReport(
        duration_s=horizon_s,
        offered_tb=n_tb,
        delivered_tb=int(delivered.sum()),
        dropped_tb=int(n_tb - delivered.sum()),
        utilization=busy / horizon if horizon else 0.0,
        goodput_tb_per_s=float(delivered.sum()) / horizon_s if horizon_s else 0.0,
        mean_latency_s=float(latency.mean()) if latency.size else math.nan,
        p95_latency_s=float(np.percentile(latency, 95)) if latency.size else math.nan,
        peak_soft_buffer_bits=_peak_occupancy(tb[:, 4], tb[:, 5]) * tb_bits,
        mean_transmissions=float(tb[:, 2].mean()) if n_tb else math.nan,
        retransmission_histogram=tuple(int(c) for c in histogram),
    )
    if log is not None:
        _write_event_log(log, cfg, tx, tb, tti, t_harq, tp, t1)
    return report


def _write_event_log(stream, cfg, tx, tb, tti, t_harq, tp, t1) -> None:
    events = []
    replication = cfg.strategy == "replication"
    for slot, pid, attempt, hit, level in tx.tolist():
        start = slot * tti
        events.append((start, pid, 2, "tx", attempt, ""))
        if replication:
            events.append((start + tti + tp + t1, pid, 0, "decode", attempt,
                           "ok" if hit else "fail"))
        else:
            outcome = "ACK" if hit else ("NACK" if level < 0 else f"NACK{level}")
            events.append((start + tti + t_harq, pid, 0, "feedback", attempt, outcome))
    for first, done, n, ok, _, _, pid in tb.tolist():
        events.append((done, pid, 1, "deliver" if ok else "drop", n, ""))
    stream.write("time_s,process_id,event,attempt,outcome\n")
    # at equal times: outcome, then TB completion, then the next transmission
    for tick, _, pid, name, attempt, outcome in sorted((e[0], e[2], e[1], *e[3:]) for e in events):
        stream.write(f"{tick / TICKS_PER_S:.9f},{pid},{name},{attempt},{outcome}\n")
