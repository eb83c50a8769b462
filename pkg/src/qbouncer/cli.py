"""Command-line entry point.

::

    qbouncer scan|check|spectrum|snapshot [--config PATH] [--out DIR] [--threads N]

Data files are written with 12 significant digits and carry no clock, so
identical configurations give byte-identical ``timeline.csv`` and
``minima.json``.  The run manifest records the resolved configuration,
derived time scales and the wall clock.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
import time
from dataclasses import dataclass, replace
from typing import Sequence

from . import __version__
from .basis import (BouncerBasis, build_basis, classical_period, dump_spectrum,
                    estimate_time_scales, revival_time)
from .config import AUTO, ScenarioConfig, load_config
from .dynamics import PositionGrid, autocorrelation, evolve_to, to_momentum, write_snapshot
from .errors import BouncerError, ConfigError
from .measures import BoundRow, check_bounds, measure_state
from .revivals import RevivalTimeline, scan

__all__ = ["main", "run_scan", "run_check", "run_spectrum", "run_snapshot", "Resolved", "resolve"]

EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def fmt(x: float) -> str:
    """Shortest decimal form with at most 12 significant digits."""
    s = format(float(x), ".12g")
    return "0" if s in ("-0", "0") else s


def _round12(x: float) -> float:
    return float(fmt(x))


@dataclass(frozen=True)
class Resolved:
    """A configuration with every ``auto`` field replaced by its value."""

    config: ScenarioConfig
    basis: BouncerBasis
    grid: PositionGrid
    t_cl: float
    t_rev: float
    t_cl_fd: float
    t_rev_fd: float
    smoothing_window: float
    matching_window: float

    def manifest_config(self) -> dict:
        return self.config.to_dict()


def resolve(config: ScenarioConfig) -> Resolved:
    """Build the basis and fill in the ``auto`` fields."""
    basis = build_basis(config.z0, config.sigma, config.n_max, config.p0)
    grid = PositionGrid(config.grid.z_max, config.grid.num_points)
    grid.validate(basis)
    t_cl, t_rev = classical_period(config.z0), revival_time(config.z0)
    t_cl_fd, t_rev_fd = estimate_time_scales(basis)
    s = config.scan
    t_end = 1.05 * t_rev if s.t_end == AUTO else s.t_end
    if t_end <= s.t_start:
        raise ConfigError("scan.t_end must exceed scan.t_start")
    dt = (t_end - s.t_start) / (s.num_samples - 1)
    d = config.detector
    window = t_cl / dt if d.smoothing_window == AUTO else d.smoothing_window
    window = max(window, 1.0)
    match = 0.02 * t_rev if d.matching_window == AUTO else d.matching_window
    resolved = replace(
        config, n_max=basis.n_max, scan=replace(s, t_end=t_end),
        detector=replace(d, smoothing_window=window, matching_window=match))
    return Resolved(resolved, basis, grid, t_cl, t_rev, t_cl_fd, t_rev_fd, window, match)


def _manifest(res: Resolved, command: str, files: Sequence[str], started: float,
              extra: dict | None = None) -> dict:
    b = res.basis
    doc = {
        "tool": "qbouncer",
        "version": __version__,
        "command": command,
        "config": res.manifest_config(),
        "derived": {
            "t_cl": res.t_cl,
            "t_rev": res.t_rev,
            "t_cl_fd": res.t_cl_fd,
            "t_rev_fd": res.t_rev_fd,
            "n0": b.n0,
            "z_n0": float(b.energies[b.n0 - 1]),
            "n_peak": b.n_peak,
            "sum_C2": b.completeness,
            "mean_energy": b.mean_energy,
            "max_tail_coefficient": b.tail_weight(),
            "num_points": res.grid.num_points,
            "dz": res.grid.dz,
        },
        "files": sorted(os.path.basename(f) for f in files),
        "started_utc": _dt.datetime.fromtimestamp(started, _dt.timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - started, 3),
    }
    if extra:
        doc.update(extra)
    return doc


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _out_dir(config: ScenarioConfig, out: str | None) -> str:
    path = out if out is not None else config.output.directory
    os.makedirs(path, exist_ok=True)
    return path


def write_timeline(timeline: RevivalTimeline, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(timeline.columns)
        for row in timeline.table():
            w.writerow([fmt(v) for v in row])


def minima_document(timeline: RevivalTimeline) -> dict:
    return {
        name: [{"t": _round12(m.t), "value": _round12(m.value), "fraction": m.fraction_label}
               for m in entries]
        for name, entries in timeline.minima.items()
    }


def run_scan(config: ScenarioConfig, out: str | None = None, threads: int = 1) -> dict:
    """Scan the default time window and write timeline, minima and manifest.

    Returns a dict with the output paths and the timeline.
    """
    started = time.time()
    res = resolve(config)
    c = res.config
    timeline = scan(res.basis, res.grid, c.scan.t_start, c.scan.t_end,
                    c.scan.num_samples, c.alphas, threads=threads)
    timeline.analyze(res.smoothing_window, c.detector.prominence, c.detector.q_max,
                     res.matching_window)
    directory = _out_dir(c, out)
    files = []
    if "csv" in c.output.formats:
        files.append(os.path.join(directory, "timeline.csv"))
        write_timeline(timeline, files[-1])
    if "json" in c.output.formats:
        files.append(os.path.join(directory, "minima.json"))
        _write_json(files[-1], minima_document(timeline))
    manifest = os.path.join(directory, "manifest.json")
    _write_json(manifest, _manifest(res, "scan", files + [manifest], started,
                                    {"threads": threads}))
    return {"files": files + [manifest], "timeline": timeline, "resolved": res}


def default_check_times(t_rev: float) -> list[float]:
    return [0.0, 0.25 * t_rev, 0.5 * t_rev, t_rev]


def run_check(config: ScenarioConfig, times: Sequence[float] | None = None,
              stream=None) -> tuple[list[tuple[float, BoundRow]], bool]:
    """Evaluate every uncertainty relation at ``times`` and print a table.

    The configured indices are checked together with ``alpha = 1``.
    Returns the rows and whether all of them hold.
    """
    stream = sys.stdout if stream is None else stream
    res = resolve(config)
    alphas = list(res.config.alphas)
    if 1.0 not in alphas:
        alphas.append(1.0)
    times = default_check_times(res.t_rev) if times is None else list(times)
    rows = []
    for t in times:
        state = to_momentum(evolve_to(res.basis, res.grid, t))
        sample = measure_state(state, alphas, autocorrelation(res.basis, t))
        rows.extend((t, r) for r in check_bounds(sample))
    print(f"{'t':>14} {'relation':<22} {'alpha':>7} {'value':>16} {'bound':>10} "
          f"{'slack':>14}  status", file=stream)
    for t, r in rows:
        a = "-" if r.alpha is None else f"{r.alpha:.4f}"
        print(f"{fmt(t):>14} {r.relation:<22} {a:>7} {fmt(r.value):>16} {fmt(r.bound):>10} "
              f"{r.slack:>14.6e}  {'ok' if r.holds else 'VIOLATED'}", file=stream)
    return rows, all(r.holds for _, r in rows)


def run_spectrum(config: ScenarioConfig, out: str | None = None) -> dict:
    """Write ``spectrum.json`` and a manifest."""
    started = time.time()
    res = resolve(config)
    directory = _out_dir(res.config, out)
    path = os.path.join(directory, "spectrum.json")
    dump_spectrum(res.basis, path)
    manifest = os.path.join(directory, "manifest.json")
    _write_json(manifest, _manifest(res, "spectrum", [path, manifest], started))
    return {"files": [path, manifest], "resolved": res}


def run_snapshot(config: ScenarioConfig, t: float, out: str | None = None) -> dict:
    """Write position and momentum amplitudes at time ``t``."""
    started = time.time()
    res = resolve(config)
    directory = _out_dir(res.config, out)
    state = to_momentum(evolve_to(res.basis, res.grid, t))
    pos, mom = write_snapshot(state, directory)
    manifest = os.path.join(directory, "manifest.json")
    _write_json(manifest, _manifest(res, "snapshot", [pos, mom, manifest], started,
                                    {"snapshot_time": t}))
    return {"files": [pos, mom, manifest], "resolved": res}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qbouncer",
        description="Wave-packet revivals and entropic uncertainty in the quantum bouncer.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON scenario (defaults if omitted)")
        p.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
        p.add_argument("--threads", type=int, default=1, metavar="N",
                       help="worker threads for the time scan")
        return p

    common(sub.add_parser("scan", help="time series, minima and manifest"))
    chk = common(sub.add_parser("check", help="evaluate every uncertainty relation"))
    chk.add_argument("--times", metavar="T1,T2,...",
                     help="comma-separated times (default 0, T_rev/4, T_rev/2, T_rev)")
    common(sub.add_parser("spectrum", help="write the eigenbasis and coefficients"))
    snap = common(sub.add_parser("snapshot", help="amplitudes at one time"))
    snap.add_argument("--time", type=float, default=0.0, help="time of the snapshot")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config)
        if args.command == "scan":
            run_scan(config, args.out, args.threads)
        elif args.command == "check":
            times = None
            if args.times:
                try:
                    times = [float(x) for x in args.times.split(",")]
                except ValueError as exc:
                    raise ConfigError(f"cannot read --times {args.times!r}") from exc
            _, ok = run_check(config, times)
            if not ok:
                print("error: at least one uncertainty relation is violated", file=sys.stderr)
                return EXIT_VIOLATION
        elif args.command == "spectrum":
            run_spectrum(config, args.out)
        else:
            run_snapshot(config, args.time, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BouncerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
