"""Efficiency scores, size/utility Pareto frontiers and key-model selection."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import ModelRecord, SnapshotError, TaskBenchmark

DEFAULT_DELTA = 0.05


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class FrontierPoint:
    id: str
    params: int
    goodness: float


@dataclass(frozen=True)
class KeyModelPair:
    task_id: str
    best: str
    efficient: str
    threshold_delta: float
    realized_drop: float
    fallback_used: bool
    # Drop measured on the raw metric rather than goodness; differs only for lower-is-better tasks.
    raw_drop: float = 0.0


def goodness(m: ModelRecord, bench: TaskBenchmark) -> float:
    """Utility re-oriented so that higher is always better."""
    if bench.higher_is_better:
        return m.utility
    if bench.lib_ceiling is None:
        raise SelectionError(
            f"task {bench.task_id!r}: metric {bench.metric_name!r} is lower-is-better but has no lib_ceiling"
        )
    if m.utility > bench.lib_ceiling:
        raise SelectionError(
            f"model {m.id!r}: utility {m.utility} exceeds lib_ceiling {bench.lib_ceiling} of task {bench.task_id!r}"
        )
    return bench.lib_ceiling - m.utility


def efficiency(m: ModelRecord, bench: TaskBenchmark) -> float:
    """Goodness per parameter."""
    g = goodness(m, bench)
    return 0.0 if g == 0 else g / m.params


def _models(bench: TaskBenchmark) -> tuple[ModelRecord, ...]:
    try:
        bench.require_models()
    except SnapshotError as exc:
        raise SelectionError(str(exc)) from None
    return bench.models


def pareto_frontier(bench: TaskBenchmark) -> list[FrontierPoint]:
    """Models not dominated in (fewer params, higher goodness).

    Returned in ascending params with strictly increasing goodness. Among
    models identical on both axes only the smallest id survives.
    """
    points = sorted(
        (FrontierPoint(m.id, m.params, goodness(m, bench)) for m in _models(bench)),
        key=lambda p: (p.params, -p.goodness, p.id),
    )
    frontier: list[FrontierPoint] = []
    for p in points:
        if not frontier or p.goodness > frontier[-1].goodness:
            frontier.append(p)
    return frontier


def best_model(bench: TaskBenchmark) -> ModelRecord:
    """Highest goodness; ties go to fewer params, then the smaller id."""
    return min(_models(bench), key=lambda m: (-goodness(m, bench), m.params, m.id))


def _most_efficient(models, bench: TaskBenchmark) -> ModelRecord:
    return min(models, key=lambda m: (-efficiency(m, bench), m.params, m.id))


def relative_drop(candidate: ModelRecord, best: ModelRecord, bench: TaskBenchmark) -> float:
    g_best = goodness(best, bench)
    if g_best <= 0:
        raise SelectionError(f"task {bench.task_id!r}: best goodness {g_best} <= 0, relative drop undefined")
    return (g_best - goodness(candidate, bench)) / g_best


def _raw_drop(candidate: ModelRecord, best: ModelRecord) -> float:
    if best.utility == 0:
        return 0.0
    return (best.utility - candidate.utility) / best.utility


def select_key_models(
    bench: TaskBenchmark, delta: float = DEFAULT_DELTA, *, allow_fallback: bool = True
) -> KeyModelPair:
    """Pick the best-performing model and the energy-efficient model of a task.

    The efficient model maximizes goodness/params among models whose relative
    goodness drop versus the best is at most ``delta``. When no model other
    than the best meets the budget and ``allow_fallback`` is set, the most
    efficient model overall is taken instead (``fallback_used``); without
    fallback the best model doubles as the efficient one.
    """
    if not 0.0 <= delta <= 1.0:
        raise SelectionError(f"delta must be in [0, 1], got {delta}")
    models = _models(bench)
    best = best_model(bench)
    if len(models) == 1:
        return KeyModelPair(bench.task_id, best.id, best.id, delta, 0.0, False, 0.0)

    drops = {m.id: relative_drop(m, best, bench) for m in models}
    within = [m for m in models if m.id != best.id and drops[m.id] <= delta]
    fallback = False
    if within:
        efficient = _most_efficient(within + [best], bench)
    elif allow_fallback:
        efficient = _most_efficient(models, bench)
        fallback = efficient.id != best.id
    else:
        efficient = best
    return KeyModelPair(
        task_id=bench.task_id,
        best=best.id,
        efficient=efficient.id,
        threshold_delta=delta,
        realized_drop=drops[efficient.id],
        fallback_used=fallback,
        raw_drop=_raw_drop(efficient, best),
    )


def published_key_models(bench: TaskBenchmark, delta: float = DEFAULT_DELTA) -> KeyModelPair:
    """Key-model pair taken from the snapshot's ``role`` annotations.

    ``fallback_used`` reports whether the published efficient model lies
    outside the ``delta`` budget.
    """
    by_role = {}
    for m in _models(bench):
        if m.role is not None:
            if m.role in by_role:
                raise SelectionError(f"task {bench.task_id!r}: more than one model annotated {m.role!r}")
            by_role[m.role] = m
    missing = {"best", "efficient"} - by_role.keys()
    if missing:
        raise SelectionError(f"task {bench.task_id!r}: no model annotated {', '.join(sorted(missing))!r}")
    best, eff = by_role["best"], by_role["efficient"]
    drop = relative_drop(eff, best, bench)
    return KeyModelPair(bench.task_id, best.id, eff.id, delta, drop, drop > delta, _raw_drop(eff, best))
