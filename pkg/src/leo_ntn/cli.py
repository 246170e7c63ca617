"""Command-line front end.

Every subcommand accepts ``--scenario FILE`` (defaults apply when omitted),
prints a plain-text report, or writes CSV with ``--format csv``. Exit status:
0 on success (an infeasible RA verdict still counts as success), 2 on usage
errors, 3 on invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry, harq, impairments, numerology, random_access
from .scenario import (SCENARIO_KEYS, PhysicalConstants, ScenarioConfig, ScenarioError,
                       load_scenario_file, render_scenario)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3


@dataclass
class Table:
    name: str
    title: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class ReportDocument:
    """Scenario echo, one section per table, and the constants used."""

    command: str
    scenario: ScenarioConfig
    sections: list[Table]

    def render(self) -> str:
        out = [f"# leo-ntn {self.command}", "", "## scenario", render_scenario(self.scenario).rstrip()]
        for table in self.sections:
            out += ["", f"## {table.title}", _text_table(table)]
            out += [f"  * {note}" for note in table.notes]
        k = self.scenario.constants
        out += ["", "## provenance",
                f"earth_radius_m = {k.earth_radius_m!r}; earth_mu_m3s2 = {k.earth_mu_m3s2!r}; "
                f"light_speed_ms = {k.light_speed_ms!r}", ""]
        return "\n".join(out)


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            v = 0.0  # drop the sign of -0.0
        return f"{v:.6g}"
    return str(value)


def _text_table(table: Table) -> str:
    cells = [table.columns] + [[fmt(v) for v in row] for row in table.rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def write_csv(table: Table, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([fmt(v) for v in row])


def _floats(text: str) -> list[float]:
    """Parse ``"a,b,c"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be > 0")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(n, 0))]
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


# --------------------------------------------------------------------------- commands

def cmd_impairments(cfg: ScenarioConfig, args) -> list[Table]:
    c = cfg.constants.light_speed_ms
    altitudes = args.altitudes_m if args.altitudes_m is not None else [cfg.altitude_m]
    delay = Table("delay", "round-trip delay (both legs ~ altitude)",
                  ["altitude_km", "rtt_ms", "one_way_ms", "rn_satellite_rtt_ms", "satellite_dgnb_rtt_ms"])
    for h in altitudes:
        b = impairments.delay_budget(h, cfg.feeder_extra_delay_s, c)
        legs = dict(b.components)
        delay.rows.append((h / 1e3, b.round_trip_s * 1e3, b.one_way_s * 1e3,
                           legs["rn_satellite"] * 1e3, legs["satellite_dgnb"] * 1e3))

    doppler = Table("doppler", "satellite Doppler vs elevation",
                    ["elevation_deg", "slant_range_km", "sat_doppler_khz"])
    for el in args.elevations_deg:
        rad = math.radians(el)
        doppler.rows.append((el, geometry.slant_range(cfg, rad) / 1e3,
                             impairments.sat_doppler(cfg, rad) / 1e3))
    doppler.notes.append(
        f"ground-track speed {geometry.ground_track_speed(cfg):.6g} m/s, "
        f"angular velocity {geometry.angular_velocity(cfg):.6g} rad/s")
    doppler.notes.append(
        f"visibility per overhead pass above {math.degrees(cfg.min_elevation_rad):.6g} deg: "
        f"{geometry.visibility_pass_duration(cfg):.6g} s")

    ue = Table("ue", "terminal Doppler",
               ["speed_kmh", "carrier_ghz", "angle_deg", "ue_doppler_hz"])
    ue.rows.append((args.ue_speed_kmh, args.ue_carrier_hz / 1e9, args.ue_angle_deg,
                    impairments.ue_doppler(args.ue_speed_kmh / 3.6, args.ue_carrier_hz,
                                           math.radians(args.ue_angle_deg), c)))
    return [delay, doppler, ue]


def cmd_doppler_surface(cfg: ScenarioConfig, args) -> list[Table]:
    el_min = math.degrees(cfg.min_elevation_rad) if args.el_min_deg is None else args.el_min_deg
    el_deg = np.array(_floats(f"{el_min}:{args.el_max_deg}:{args.el_step_deg}"))
    rb_km = np.array(_floats(f"0:{args.rb_max_km}:{args.rb_step_km}"))
    surf = impairments.residual_doppler_surface(
        cfg, np.minimum(np.radians(el_deg), math.pi / 2), rb_km * 1e3)
    table = Table("surface", "residual Doppler after GNSS compensation",
                  ["elevation_deg", "position_error_km", "true_doppler_khz",
                   "estimated_doppler_khz", "residual_doppler_khz"])
    for i, el in enumerate(el_deg):
        for j, rb in enumerate(rb_km):
            table.rows.append((float(el), float(rb), surf.true_doppler_hz[i, j] / 1e3,
                               surf.estimated_doppler_hz[i, j] / 1e3,
                               surf.residual_doppler_hz[i, j] / 1e3))
    peak = np.argmax(surf.residual_doppler_hz, axis=0)
    j = len(rb_km) - 1
    table.notes.append(
        f"at {rb_km[j]:.6g} km error the residual peaks at {el_deg[peak[j]]:.6g} deg "
        f"({surf.residual_doppler_hz[peak[j], j] / 1e3:.6g} kHz)")
    return [table]


def cmd_numerology(cfg: ScenarioConfig, args) -> list[Table]:
    entries = numerology.numerology_table(cfg, range(args.max_index + 1), args.tolerance_ratio)
    table = Table("numerology", "position error tolerated per subcarrier spacing (zenith)",
                  ["scs_khz", "max_doppler_khz", "max_position_error_km"])
    for e in entries:
        table.rows.append((e.scs_hz / 1e3, e.tolerated_doppler_hz / 1e3, e.max_position_error_m / 1e3))
    raw = impairments.sat_doppler(cfg, cfg.min_elevation_rad)
    try:
        pick = numerology.select_numerology(raw, entries)
        table.notes.append(f"uncompensated Doppler {raw / 1e3:.6g} kHz fits SCS {pick.scs_hz / 1e3:.6g} kHz")
    except ValueError:
        table.notes.append(
            f"uncompensated Doppler {raw / 1e3:.6g} kHz at the minimum elevation exceeds every "
            f"listed SCS tolerance; pre-compensation is required")
    return [table]


def _preamble(args) -> random_access.PreambleFormat:
    by_name = {p.name: p for p in random_access.LTE_PREAMBLE_FORMATS}
    base = by_name[args.preamble] if args.preamble else random_access.largest_preamble()
    if args.preamble_radius_km is not None:
        return random_access.PreambleFormat.from_radius(
            f"{base.name}*", base.cp_duration_s, base.sequence_duration_s, args.preamble_radius_km * 1e3)
    return base


def cmd_ra_check(cfg: ScenarioConfig, args) -> list[Table]:
    rtt = (impairments.round_trip_time(cfg).round_trip_s if args.rtt_ms is None
           else args.rtt_ms * 1e-3)
    diff = geometry.differential_distance(cfg).differential_m
    pre = _preamble(args)
    rar = random_access.rar_window_for_option(
        args.rar_option, args.rar_window_ms * 1e-3, rtt,
        satellite_link=not args.terrestrial_link, margin_s=args.margin_ms * 1e-3)
    timers = random_access.RaTimers(rar, args.contention_ms * 1e-3)

    ta_distance = diff
    notes = []
    if args.gnss_error_km is not None:
        residual_ta, _ = random_access.gnss_assisted_ta(diff, args.gnss_error_km * 1e3, pre)
        ta_distance = args.gnss_error_km * 1e3
        notes.append(f"GNSS-assisted TA: residual {residual_ta * 1e3:.6g} ms from a "
                     f"{args.gnss_error_km:.6g} km position error")
    ue = random_access.check_ue_ra(timers, rtt)
    rn = random_access.check_rn_attach(timers, rtt, pre, ta_distance)
    table = Table("verdicts", "random-access timing budgets",
                  ["stage", "feasible", "violations", "rtt_ms", "rar_window_ms",
                   "contention_timer_ms", "ta_distance_km", "required_ta_ms",
                   "preamble", "preamble_radius_km", "preamble_ta_ms"])
    for v in (ue, rn):
        table.rows.append((v.stage, v.feasible, ";".join(x.budget for x in v.violations) or "-",
                           rtt * 1e3, rar * 1e3, timers.contention_timer_s * 1e3,
                           ta_distance / 1e3, random_access.timing_advance(ta_distance) * 1e3,
                           pre.name, pre.max_cell_radius_m / 1e3,
                           random_access.timing_advance(pre.max_cell_radius_m) * 1e3))
    notes.append(f"two-relay differential distance at beam edge: {diff / 1e3:.6g} km")
    notes.append("after a synchronisation loss all relays re-attach at once and contend for "
                 "the same RA resources (not modelled)")
    table.notes = notes
    return [table]


def _harq_timing(cfg: ScenarioConfig, args) -> tuple[float, float]:
    """(propagation one-way s, tti s) for HARQ commands."""
    tti = args.tti_ms * 1e-3
    if args.rtt_ms is not None:
        rtt = args.rtt_ms * 1e-3
    else:
        rtt = impairments.round_trip_time(cfg).round_trip_s
        if not args.exact_rtt:
            # HARQ timing runs on whole slots
            rtt = round(rtt / tti) * tti
    return rtt / 2.0, tti


def cmd_harq_dim(cfg: ScenarioConfig, args) -> list[Table]:
    tp, tti = _harq_timing(cfg, args)
    half = args.processing_ms * 1e-3 / 2.0
    hc = harq.HarqConfig(tti_s=tti, proc_rx_s=half, proc_tx_s=half,
                         ack_duration_s=args.ack_ms * 1e-3, propagation_s=tp)
    t_harq = harq.harq_cycle_time(hc)
    n_min = harq.min_processes(t_harq, tti)
    rate = args.link_rate_mbps * 1e6
    buf = harq.buffer_requirement(n_min, tti, rate)
    base = harq.buffer_requirement(args.baseline_processes, tti, rate)
    table = Table("dimensioning", "HARQ dimensioning",
                  ["rtt_ms", "t_harq_ms", "tti_ms", "n_min", "dci_bits", "buffer_bits",
                   "baseline_processes", "baseline_dci_bits", "baseline_buffer_bits", "buffer_ratio",
                   "utilization_at_baseline"])
    table.rows.append((2 * tp * 1e3, t_harq * 1e3, tti * 1e3, n_min,
                       harq.dci_process_field_width(n_min), buf, args.baseline_processes,
                       harq.dci_process_field_width(args.baseline_processes), base,
                       buf / base if base else math.nan,
                       harq.theoretical_utilization(args.baseline_processes, t_harq, tti)))
    table.notes.append(f"N_min = {n_min}")
    return [table]


def _parse_level_probs(text):
    if text is None:
        return None
    rows = tuple(tuple(_floats(part)) for part in text.split(";"))
    return rows


def cmd_harq_sim(cfg: ScenarioConfig, args) -> list[Table]:
    tp, tti = _harq_timing(cfg, args)
    half = args.processing_ms * 1e-3 / 2.0
    probe = harq.HarqConfig(tti_s=tti, proc_rx_s=half, proc_tx_s=half,
                            ack_duration_s=args.ack_ms * 1e-3, propagation_s=tp)
    t_harq = harq.harq_cycle_time(probe)
    replication = args.strategy == "replication"
    # replication sends back to back on one process, with no feedback to wait for
    n = args.processes or (1 if replication else harq.min_processes(t_harq, tti))
    bits = args.feedback_bits or (2 if args.strategy == "multibit" else 1)
    hc = harq.HarqConfig(
        tti_s=tti, proc_rx_s=half, proc_tx_s=half, ack_duration_s=args.ack_ms * 1e-3,
        propagation_s=tp, num_processes=int(n), feedback_bits=bits,
        max_transmissions=args.max_tx, strategy=args.strategy,
        replication_factor=args.replication, success_prob=tuple(args.success_prob),
        level_success_prob=_parse_level_probs(args.level_prob),
        level_weights=tuple(args.level_weights), link_rate_bps=args.link_rate_mbps * 1e6,
        seed=int(args.seed))
    if args.event_log:
        with open(args.event_log, "w", encoding="utf-8", newline="") as fh:
            rep = harq.simulate(hc, args.duration_s, log=fh)
    else:
        rep = harq.simulate(hc, args.duration_s)
    table = Table("simulation", f"HARQ simulation ({hc.strategy}, N = {hc.num_processes})",
                  ["strategy", "processes", "seed", "duration_s", "offered_tb", "delivered_tb",
                   "dropped_tb", "utilization", "theoretical_utilization", "goodput_tb_per_s",
                   "mean_latency_ms", "p95_latency_ms", "mean_transmissions",
                   "peak_soft_buffer_bits", "buffer_requirement_bits"])
    table.rows.append((hc.strategy, hc.num_processes, hc.seed, rep.duration_s, rep.offered_tb,
                       rep.delivered_tb, rep.dropped_tb, rep.utilization,
                       1.0 if replication else harq.theoretical_utilization(hc.num_processes, t_harq, tti),
                       rep.goodput_tb_per_s, rep.mean_latency_s * 1e3, rep.p95_latency_s * 1e3,
                       rep.mean_transmissions, rep.peak_soft_buffer_bits,
                       harq.buffer_requirement(hc.num_processes, tti, hc.link_rate_bps)))
    hist = Table("histogram", "transmissions per TB", ["transmissions", "tb_count"],
                 [(i + 1, c) for i, c in enumerate(rep.retransmission_histogram)])
    return [table, hist]


COMMANDS = {
    "impairments": cmd_impairments,
    "doppler-surface": cmd_doppler_surface,
    "numerology": cmd_numerology,
    "ra-check": cmd_ra_check,
    "harq-dim": cmd_harq_dim,
    "harq-sim": cmd_harq_sim,
}


# --------------------------------------------------------------------------- parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", metavar="FILE", help="scenario file (key = value, SI units)")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--table", help="which table to emit as CSV (default: the first)")
    p.add_argument("-o", "--output", metavar="FILE", help="write to FILE instead of stdout")


def _add_harq_timing(p):
    p.add_argument("--tti-ms", type=float, default=1.0)
    p.add_argument("--processing-ms", type=float, default=8.0, help="T1 + T2, split evenly")
    p.add_argument("--ack-ms", type=float, default=0.0)
    p.add_argument("--rtt-ms", type=float, help="override the scenario RTT")
    p.add_argument("--exact-rtt", action="store_true",
                   help="use the scenario RTT as is instead of rounding it to whole TTIs")
    p.add_argument("--link-rate-mbps", type=float, default=100.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leo-ntn", description="LEO satellite backhaul feasibility for 5G NR procedures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("impairments", help="delay budget and Doppler vs elevation")
    _add_common(p)
    p.add_argument("--elevations-deg", type=_floats, default=[45.0, 60.0, 75.0, 90.0])
    p.add_argument("--altitudes-m", type=_floats, help="altitudes for the delay table (0 allowed)")
    p.add_argument("--ue-speed-kmh", type=float, default=500.0)
    p.add_argument("--ue-carrier-hz", type=float, default=4e9)
    p.add_argument("--ue-angle-deg", type=float, default=0.0)

    p = sub.add_parser("doppler-surface", help="residual Doppler over elevation x position error")
    _add_common(p)
    p.add_argument("--el-min-deg", type=float, help="default: scenario minimum elevation")
    p.add_argument("--el-max-deg", type=float, default=90.0)
    p.add_argument("--el-step-deg", type=float, default=1.0)
    p.add_argument("--rb-max-km", type=float, default=50.0)
    p.add_argument("--rb-step-km", type=float, default=1.0)

    p = sub.add_parser("numerology", help="tolerated position error per SCS")
    _add_common(p)
    p.add_argument("--max-index", type=int, default=3, help="largest numerology index n")
    p.add_argument("--tolerance-ratio", type=float, default=numerology.DOPPLER_TOLERANCE_RATIO)

    p = sub.add_parser("ra-check", help="UE random access and relay attach verdicts")
    _add_common(p)
    p.add_argument("--rar-window-ms", type=float, default=15.0)
    p.add_argument("--contention-ms", type=float, default=64.0)
    p.add_argument("--rtt-ms", type=float, help="override the scenario RTT")
    p.add_argument("--preamble", choices=[f.name for f in random_access.LTE_PREAMBLE_FORMATS])
    p.add_argument("--preamble-radius-km", type=float, help="custom preamble radius (longer preamble)")
    p.add_argument("--rar-option", choices=("none", "fixed", "signalled"), default="none",
                   help="RAR window mitigation: fixed worst-case window or one-bit signalled window")
    p.add_argument("--terrestrial-link", action="store_true",
                   help="clear the satellite-link indicator (signalled option)")
    p.add_argument("--margin-ms", type=float, default=0.0)
    p.add_argument("--gnss-error-km", type=float, help="pre-compensate TA with this position error")

    p = sub.add_parser("harq-dim", help="HARQ process count, DCI width and soft buffer")
    _add_common(p)
    _add_harq_timing(p)
    p.add_argument("--baseline-processes", type=int, default=8)

    p = sub.add_parser("harq-sim", help="simulate parallel stop-and-wait HARQ")
    _add_common(p)
    _add_harq_timing(p)
    p.add_argument("--strategy", choices=harq.STRATEGIES, default="full")
    p.add_argument("--processes", type=int, help="default: minimum for continuous transmission")
    p.add_argument("--feedback-bits", type=int, choices=(1, 2))
    p.add_argument("--max-tx", type=int, default=4)
    p.add_argument("--replication", type=int, default=1)
    p.add_argument("--success-prob", type=_floats, default=[1.0],
                   help="per-attempt decode probabilities, comma separated")
    p.add_argument("--level-prob", help="multibit: four ';'-separated per-attempt rows")
    p.add_argument("--level-weights", type=_floats, default=[0.25] * 4)
    p.add_argument("--duration-s", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--event-log", metavar="FILE", help="write time_s,process_id,event,attempt,outcome")

    p = sub.add_parser("sweep", help="Cartesian sweep of a subcommand's scalar inputs to CSV")
    p.add_argument("target", choices=sorted(COMMANDS))
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUES",
                   help="scenario key or option name; VALUES is 'a,b,c' or 'start:stop:step'")
    p.add_argument("--scenario", metavar="FILE")
    p.add_argument("--table", help="which table of the target to collect")
    p.add_argument("-j", "--jobs", type=int, default=1)
    p.add_argument("-o", "--output", metavar="FILE")
    p.epilog = "Any other option is passed unchanged to the target subcommand."
    return parser


# --------------------------------------------------------------------------- sweep

def _pick_table(tables: list[Table], name: str | None) -> Table:
    if name is None:
        return tables[0]
    for t in tables:
        if t.name == name:
            return t
    raise ScenarioError(f"no table {name!r}; available: {', '.join(t.name for t in tables)}")


def _sweep_point(job):
    target, base_cfg, base_args, assignment, table_name = job
    ns = argparse.Namespace(**vars(base_args))
    scen = {}
    for key, value in assignment:
        if key in SCENARIO_KEYS:
            scen[key] = value
        else:
            setattr(ns, key, value)
    cfg = base_cfg.with_overrides(**scen) if scen else base_cfg
    return _pick_table(COMMANDS[target](cfg, ns), table_name)


def run_sweep(args, parser, base_cfg, rest=()) -> Table:
    base_args = build_parser().parse_args([args.target, *[a for a in rest if a != "--"]])
    grid = []
    for item in args.param:
        key, sep, values = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            parser.error(f"--param expects NAME=VALUES, got {item!r}")
        if key not in SCENARIO_KEYS and not hasattr(base_args, key):
            parser.error(f"unknown sweep parameter {key!r} for {args.target}")
        current = getattr(base_args, key, None)
        parsed = _floats(values)
        if isinstance(current, bool):
            parsed = [bool(v) for v in parsed]
        elif isinstance(current, int):
            parsed = [int(v) for v in parsed]
        grid.append((key, parsed))
    keys = [k for k, _ in grid]
    combos = sorted(itertools.product(*[v for _, v in grid])) if grid else [()]
    jobs = [(args.target, base_cfg, base_args, tuple(zip(keys, combo)), args.table) for combo in combos]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    first = results[0]
    out = Table("sweep", f"sweep of {args.target}", [f"sweep_{k}" for k in keys] + first.columns)
    for combo, table in zip(combos, results):
        for row in table.rows:
            out.rows.append(tuple(combo) + tuple(row))
    return out


# --------------------------------------------------------------------------- entry

def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command != "sweep":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        cfg = load_scenario_file(args.scenario) if args.scenario else ScenarioConfig()
        if args.command == "sweep":
            buf = io.StringIO()
            write_csv(run_sweep(args, parser, cfg, extra), buf)
            _emit(buf.getvalue(), args.output)
            return EXIT_OK
        tables = COMMANDS[args.command](cfg, args)
        if args.format == "csv":
            buf = io.StringIO()
            write_csv(_pick_table(tables, args.table), buf)
            _emit(buf.getvalue(), args.output)
        else:
            _emit(ReportDocument(args.command, cfg, tables).render(), args.output)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"leo-ntn: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


__all__ = ["run", "main", "build_parser", "ReportDocument", "Table", "write_csv", "fmt",
           "PhysicalConstants"]
