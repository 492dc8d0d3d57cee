"""Build and write the CLI's machine-readable artifacts.

Every float in an artifact is written with 6 significant digits and rows are
emitted in snapshot order, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import TaskBenchmark, WeightPolicy, task_weights
from .energy import FitError, PowerLawFit, fit_task, impute_energies, within_reported_range
from .projection import ProjectionSeries
from .selection import KeyModelPair, pareto_frontier, published_key_models, select_key_models
from .scenarios import Policy, ScenarioResult, SweepPoint, aggregate_weighted, run_policy

log = logging.getLogger(__name__)


def sig6(x: float) -> str:
    return format(x, ".6g")


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(sig6(obj))
    if isinstance(obj, Mapping):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return sig6(v)
    return str(v)


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


@dataclass
class Table:
    """Tabular artifact that can be rendered as CSV or as a JSON array of objects."""

    header: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def records(self) -> list[dict]:
        return [dict(zip(self.header, r)) for r in self.rows]

    def render(self, fmt: str) -> str:
        return dumps_json(self.records()) if fmt == "json" else dumps_csv(self.header, self.rows)


# ---------------------------------------------------------------------------
# pipeline pieces

@dataclass
class Prepared:
    benchmarks: list[TaskBenchmark]
    fits: list[PowerLawFit]
    skipped_fits: dict[str, str]


def prepare(benchmarks: Sequence[TaskBenchmark], include_estimated: bool = False) -> Prepared:
    """Fit each task's power law where possible and impute missing energies."""
    out, fits, skipped = [], [], {}
    for bench in benchmarks:
        try:
            fit = fit_task(bench, include_estimated)
        except FitError as exc:
            skipped[bench.task_id] = str(exc)
            log.info("no power-law fit for %s: %s", bench.task_id, exc)
            out.append(bench)
            continue
        if not within_reported_range(fit):
            log.warning(
                "fit for %s (alpha=%.4f, beta=%.4f) lies outside the reported coefficient range",
                bench.task_id, fit.alpha, fit.beta,
            )
        fits.append(fit)
        out.append(impute_energies(bench, fit))
    return Prepared(out, fits, skipped)


def key_pairs(benchmarks: Sequence[TaskBenchmark], delta: float, source: str = "computed") -> list[KeyModelPair]:
    if source == "published":
        return [published_key_models(b, delta) for b in benchmarks]
    return [select_key_models(b, delta) for b in benchmarks]


def frontier_table(benchmarks: Sequence[TaskBenchmark]) -> Table:
    t = Table(("task_id", "id", "params", "goodness"))
    for bench in benchmarks:
        for p in pareto_frontier(bench):
            t.rows.append((bench.task_id, p.id, p.params, float(p.goodness)))
    return t


def fits_table(fits: Sequence[PowerLawFit]) -> Table:
    t = Table(("task_id", "alpha", "beta", "n_points", "r2"))
    for f in fits:
        t.rows.append((f.task_id, f.alpha, f.beta, f.n_points, f.r2))
    return t


def selection_table(benchmarks: Sequence[TaskBenchmark], pairs: Sequence[KeyModelPair]) -> Table:
    """One row per task: efficient and best model columns, plus agreement with published roles."""
    t = Table((
        "task_id",
        "efficient_id", "efficient_params", "efficient_utility", "efficient_energy_j",
        "efficient_energy_source", "efficient_downloads",
        "best_id", "best_params", "best_utility", "best_energy_j",
        "best_energy_source", "best_downloads",
        "realized_drop", "raw_drop", "fallback_used", "params_estimated", "matches_published",
    ))
    for bench, pair in zip(benchmarks, pairs):
        eff, best = bench.model(pair.efficient), bench.model(pair.best)
        roles = {m.role: m.id for m in bench.models if m.role}
        if roles:
            matches = roles.get("efficient") == eff.id and roles.get("best") == best.id
        else:
            matches = None
        t.rows.append((
            bench.task_id,
            eff.id, eff.params, float(eff.utility), eff.energy_j, eff.energy_source.value, eff.downloads,
            best.id, best.params, float(best.utility), best.energy_j, best.energy_source.value, best.downloads,
            float(pair.realized_drop), float(pair.raw_drop), pair.fallback_used,
            eff.params_source.value == "estimated" or best.params_source.value == "estimated",
            matches,
        ))
    return t


@dataclass
class SavingsReport:
    policy: Policy
    results: list[ScenarioResult]
    weights: dict[str, float]
    weight_policy: WeightPolicy
    er_global: float
    uv_global: float

    def to_dict(self) -> dict:
        return {
            "policy": self.policy.value,
            "results": [r.to_dict() for r in self.results],
            "aggregate": {
                "er_global": self.er_global,
                "uv_global": self.uv_global,
                "weight_policy": self.weight_policy.value,
                "weights": dict(self.weights),
            },
        }

    def table(self) -> Table:
        t = Table(("task_id", "policy", "e_before", "e_after", "er", "u_before", "u_after", "uv", "weight"))
        for r in self.results:
            t.rows.append((r.task_id, r.policy.value, r.e_before, r.e_after, r.er, r.u_before, r.u_after, r.uv,
                           float(self.weights[r.task_id])))
        t.rows.append(("__global__", self.policy.value, None, None, self.er_global, None, None, self.uv_global,
                       float(sum(self.weights.values()))))
        return t


def savings_report(
    benchmarks: Sequence[TaskBenchmark],
    pairs: Sequence[KeyModelPair],
    policy: Policy | str,
    weight_policy: WeightPolicy | str = WeightPolicy.SUM_OF_MODEL_DOWNLOADS,
) -> SavingsReport:
    policy, weight_policy = Policy(policy), WeightPolicy(weight_policy)
    results = [run_policy(b, p, policy) for b, p in zip(benchmarks, pairs)]
    weights = task_weights(benchmarks, weight_policy)
    er, uv = aggregate_weighted(results, weights)
    return SavingsReport(policy, results, weights, weight_policy, er, uv)


def sweep_table(points: Sequence[SweepPoint]) -> Table:
    return Table(("delta", "er_global", "uv_global"),
                 [(float(p.delta), p.er_global, p.uv_global) for p in points])


def projection_table(series: Sequence[ProjectionSeries]) -> Table:
    t = Table(("year", "scenario", "low_twh", "high_twh"))
    years = sorted({y for s in series for y in s.points})
    for year in years:
        for s in series:
            if year in s.points:
                lo, hi = s.points[year]
                t.rows.append((year, s.scenario.value, float(lo), float(hi)))
    return t


def write_artifact(out_dir: Path, stem: str, table: Table, formats: Iterable[str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in sorted(set(formats)):
        path = out_dir / f"{stem}.{fmt}"
        path.write_text(table.render(fmt), encoding="utf-8")
        written.append(path)
    return written


def write_json(out_dir: Path, name: str, obj) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


__all__ = [
    "Prepared", "SavingsReport", "Table", "dumps_csv", "dumps_json", "fits_table",
    "frontier_table", "key_pairs", "prepare", "projection_table", "savings_report", "selection_table",
    "sig6", "sweep_table", "write_artifact", "write_json",
]
