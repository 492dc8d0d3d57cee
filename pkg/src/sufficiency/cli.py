"""Command-line entry point: ``sufficiency <command> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import report
from .catalog import WeightPolicy, bundled_snapshot_path, load_snapshot, task_weights
from .hub import ENDPOINT_ENV, FetchMode, UsageFetchError, fetch_usage
from .projection import (
    ProjectionConfig,
    full_adoption_pessimistic,
    full_adoption_savings,
    project_consumption,
    reactor_equivalents,
)
from .scenarios import Policy, SweepMode, sweep_utility_drop

log = logging.getLogger("sufficiency")

COMMANDS = ("validate", "frontier", "fit", "select", "savings", "sweep", "project", "report")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64

USAGE = f"usage: sufficiency {{{','.join(COMMANDS)}}} [options]   (sufficiency <command> --help)"

DEFAULT_DELTAS = "0,0.01,0.02,0.05,0.1,0.15,0.2,0.3,0.5,1"


def _formats(text: str) -> set[str]:
    formats = {f.strip().lower() for f in text.split(",") if f.strip()}
    bad = formats - {"json", "csv"}
    if bad or not formats:
        raise argparse.ArgumentTypeError(f"formats must be drawn from json,csv; got {text!r}")
    return formats


def _deltas(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid delta list {text!r}") from None


def _delta(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"delta must be in [0, 1], got {value}")
    return value


def build_parser(command: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"sufficiency {command}")
    p.add_argument("--snapshot", type=Path, default=None,
                   help="snapshot file (.json or .csv); defaults to the bundled key-model fixture")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--format", type=_formats, default={"json", "csv"}, help="comma list of json,csv")
    p.add_argument("--delta", type=_delta, default=0.05, help="maximum utility drop for key-model selection")
    p.add_argument("--policy", choices=[x.value for x in Policy], default=Policy.KEY_SWITCH.value)
    p.add_argument("--pairs", choices=["computed", "published"], default="computed",
                   help="key models from the selection rule or from the snapshot's role annotations")
    p.add_argument("--weights", choices=[x.value for x in WeightPolicy],
                   default=WeightPolicy.SUM_OF_MODEL_DOWNLOADS.value)
    p.add_argument("--deltas", type=_deltas, default=_deltas(DEFAULT_DELTAS))
    p.add_argument("--mode", choices=[x.value for x in SweepMode], default=SweepMode.KEY_MODELS.value)
    p.add_argument("--projection", type=Path, default=None, help="projection config JSON")
    p.add_argument("--include-estimated", action="store_true",
                   help="also fit on energies that are already estimates")
    p.add_argument("--refresh-usage", action="store_true",
                   help=f"refresh hub download counts from ${ENDPOINT_ENV} before analysis")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load(args) -> list:
    path = args.snapshot or bundled_snapshot_path()
    benchmarks = load_snapshot(path)
    if args.refresh_usage:
        benchmarks = fetch_usage(benchmarks, os.environ.get(ENDPOINT_ENV), FetchMode.REFRESH)
    return benchmarks


def _validate(benchmarks) -> list[str]:
    problems = []
    for b in benchmarks:
        if not b.models:
            problems.append(f"task {b.task_id!r} has no models")
            continue
        if not b.higher_is_better and b.lib_ceiling is None:
            problems.append(f"task {b.task_id!r} is lower-is-better without lib_ceiling")
        if sum(m.downloads for m in b.models) == 0:
            problems.append(f"task {b.task_id!r} has zero total downloads")
    return problems


def _projection(args) -> tuple[ProjectionConfig, list]:
    cfg = ProjectionConfig.load(args.projection)
    return cfg, project_consumption(cfg)


def _projection_summary(cfg: ProjectionConfig) -> dict:
    rows = {}
    for year in cfg.baseline:
        lo, hi = full_adoption_savings(cfg, year)
        p_lo, p_hi = full_adoption_pessimistic(cfg, year)
        rows[str(year)] = {
            "savings_low_twh": lo,
            "savings_high_twh": hi,
            "reactors_low": reactor_equivalents(lo, cfg),
            "reactors_high": reactor_equivalents(hi, cfg),
            "pessimistic_low_twh": p_lo,
            "pessimistic_high_twh": p_hi,
        }
    return {"full_adoption_savings": rows, "savings_rate": cfg.savings_rate, "increase_rate": cfg.increase_rate}


def run(command: str, args) -> int:
    out, formats = args.out, args.format
    if command == "project":
        if args.projection is None:
            log.error("project needs --projection CONFIG.json")
            return EXIT_INVALID
        cfg, series = _projection(args)
        report.write_artifact(out, "projection", report.projection_table(series), formats)
        report.write_json(out, "projection_summary.json", _projection_summary(cfg))
        return EXIT_OK

    benchmarks = _load(args)
    if command == "validate":
        problems = _validate(benchmarks)
        for msg in problems:
            print(f"invalid: {msg}")
        n_models = sum(len(b.models) for b in benchmarks)
        print(f"{len(benchmarks)} task(s), {n_models} model(s): {'FAILED' if problems else 'ok'}")
        return EXIT_INVALID if problems else EXIT_OK

    prepared = report.prepare(benchmarks, args.include_estimated)
    benches = prepared.benchmarks
    written = []
    if command in ("frontier", "report"):
        written += report.write_artifact(out, "frontier", report.frontier_table(benches), formats)
    if command in ("fit", "report"):
        written.append(report.write_json(out, "fits.json", report.fits_table(prepared.fits).records()))
        if "csv" in formats:
            written += report.write_artifact(out, "fits", report.fits_table(prepared.fits), {"csv"})
    pairs = None
    if command in ("select", "savings", "report"):
        pairs = report.key_pairs(benches, args.delta, args.pairs)
    if command in ("select", "report"):
        written += report.write_artifact(out, "key_models", report.selection_table(benches, pairs), formats)
    if command == "savings":
        rep = report.savings_report(benches, pairs, args.policy, args.weights)
        written.append(report.write_json(out, "savings.json", rep.to_dict()))
        if "csv" in formats:
            written += report.write_artifact(out, "savings", rep.table(), {"csv"})
    if command == "report":
        bundle_savings = {}
        for policy in Policy:
            rep = report.savings_report(benches, pairs, policy, args.weights)
            bundle_savings[policy.value] = rep.to_dict()
            written += report.write_artifact(out, f"savings_{policy.value}", rep.table(), formats)
    if command in ("sweep", "report"):
        modes = [SweepMode(args.mode)] if command == "sweep" else list(SweepMode)
        sweeps = {}
        for mode in modes:
            points = sweep_utility_drop(benches, args.deltas, mode, task_weights(benches, args.weights))
            stem = "sweep" if command == "sweep" else f"sweep_{mode.value}"
            sweeps[mode.value] = report.sweep_table(points).records()
            written += report.write_artifact(out, stem, report.sweep_table(points), formats)
    if command == "report":
        bundle = {
            "snapshot": str(args.snapshot) if args.snapshot else "bundled:key_models.json",
            "delta": args.delta,
            "pairs": args.pairs,
            "weight_policy": args.weights,
            "fits": report.fits_table(prepared.fits).records(),
            "unfitted_tasks": dict(sorted(prepared.skipped_fits.items())),
            "frontier": report.frontier_table(benches).records(),
            "key_models": report.selection_table(benches, pairs).records(),
            "savings": bundle_savings,
            "sweeps": sweeps,
        }
        if args.projection is not None:
            cfg, series = _projection(args)
            written += report.write_artifact(out, "projection", report.projection_table(series), formats)
            bundle["projection"] = report.projection_table(series).records()
            bundle["projection_summary"] = _projection_summary(cfg)
        written.append(report.write_json(out, "report.json", bundle))
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(USAGE)
        return EXIT_OK if argv else EXIT_USAGE
    command, rest = argv[0], argv[1:]
    if command not in COMMANDS:
        print(f"unknown command {command!r}", file=sys.stderr)
        print(USAGE, file=sys.stderr)
        return EXIT_USAGE
    try:
        args = build_parser(command).parse_args(rest)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(command, args)
    # every domain error (snapshot, selection, fit, scenario, projection) is a ValueError
    except (ValueError, UsageFetchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
