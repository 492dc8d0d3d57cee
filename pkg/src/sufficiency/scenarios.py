"""Energy/utility what-if scenarios for redirecting inference traffic."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from enum import Enum

from .catalog import ModelRecord, TaskBenchmark, WeightPolicy, task_weights
from .selection import KeyModelPair, goodness, select_key_models


class Policy(str, Enum):
    KEY_SWITCH = "key_switch"
    REDIRECT_TO_EFFICIENT = "redirect_to_efficient"
    REDIRECT_TO_BEST = "redirect_to_best"


class SweepMode(str, Enum):
    KEY_MODELS = "key_models"
    ALL_MODELS = "all_models"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioResult:
    task_id: str
    policy: Policy
    e_before: float
    e_after: float
    u_before: float
    u_after: float

    @property
    def er(self) -> float:
        """Energy reduction fraction; negative when the policy costs energy."""
        return (self.e_before - self.e_after) / self.e_before

    @property
    def uv(self) -> float:
        """Signed utility variation fraction on the goodness scale."""
        return (self.u_after - self.u_before) / self.u_before

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "policy": self.policy.value,
            "e_before": self.e_before,
            "e_after": self.e_after,
            "er": self.er,
            "u_before": self.u_before,
            "u_after": self.u_after,
            "uv": self.uv,
        }


@dataclass(frozen=True)
class SweepPoint:
    delta: float
    er_global: float
    uv_global: float


def _energy(m: ModelRecord) -> float:
    if m.energy_j is None:
        raise ScenarioError(f"model {m.id!r} in task {m.task_id!r} has no energy (measure or impute it first)")
    return m.energy_j


def run_key_switch(bench: TaskBenchmark, pair: KeyModelPair) -> ScenarioResult:
    """Replace the best-performing model by the efficient one, ignoring usage."""
    best, eff = bench.model(pair.best), bench.model(pair.efficient)
    return ScenarioResult(
        task_id=bench.task_id,
        policy=Policy.KEY_SWITCH,
        e_before=_energy(best),
        e_after=_energy(eff),
        u_before=goodness(best, bench),
        u_after=goodness(eff, bench),
    )


def redirect_downloads(bench: TaskBenchmark, pair: KeyModelPair, policy: Policy | str) -> dict[str, int]:
    """Downloads per model id after applying a redirect policy.

    ``redirect_to_efficient`` moves the usage of every model strictly larger
    than the efficient model onto it; ``redirect_to_best`` moves all usage to
    the best model.
    """
    policy = Policy(policy)
    after = {m.id: m.downloads for m in bench.models}
    if policy is Policy.REDIRECT_TO_EFFICIENT:
        target = bench.model(pair.efficient)
        for m in bench.models:
            if m.params > target.params:
                after[target.id] += after[m.id]
                after[m.id] = 0
    elif policy is Policy.REDIRECT_TO_BEST:
        total = sum(after.values())
        after = dict.fromkeys(after, 0)
        after[pair.best] = total
    else:
        raise ScenarioError(f"{policy.value} is not a redirect policy")
    return after


def run_redirect(bench: TaskBenchmark, pair: KeyModelPair, policy: Policy | str) -> ScenarioResult:
    """Download-weighted energy and mean goodness before/after a redirect."""
    policy = Policy(policy)
    total = sum(m.downloads for m in bench.models)
    if total == 0:
        raise ScenarioError(f"task {bench.task_id!r} has zero total downloads")
    after = redirect_downloads(bench, pair, policy)
    energy = {m.id: _energy(m) for m in bench.models}
    good = {m.id: goodness(m, bench) for m in bench.models}
    before = {m.id: m.downloads for m in bench.models}
    return ScenarioResult(
        task_id=bench.task_id,
        policy=policy,
        e_before=math.fsum(before[i] * energy[i] for i in before),
        e_after=math.fsum(after[i] * energy[i] for i in after),
        u_before=math.fsum(before[i] * good[i] for i in before) / total,
        u_after=math.fsum(after[i] * good[i] for i in after) / total,
    )


def run_policy(bench: TaskBenchmark, pair: KeyModelPair, policy: Policy | str) -> ScenarioResult:
    policy = Policy(policy)
    if policy is Policy.KEY_SWITCH:
        return run_key_switch(bench, pair)
    return run_redirect(bench, pair, policy)


def aggregate_weighted(results: Iterable[ScenarioResult], weights: Mapping[str, float]) -> tuple[float, float]:
    """Weighted means of ``er`` and ``uv`` across tasks."""
    results = list(results)
    if not results:
        raise ScenarioError("nothing to aggregate")
    missing = sorted({r.task_id for r in results} - weights.keys())
    if missing:
        raise ScenarioError(f"no weight for task(s): {', '.join(missing)}")
    total = math.fsum(weights[r.task_id] for r in results)
    if not total > 0:
        raise ScenarioError("weights sum to zero")
    er = math.fsum(weights[r.task_id] * r.er for r in results) / total
    uv = math.fsum(weights[r.task_id] * r.uv for r in results) / total
    return er, uv


def _unchanged(result: ScenarioResult) -> ScenarioResult:
    return replace(result, e_after=result.e_before, u_after=result.u_before)


def sweep_utility_drop(
    benchmarks: Sequence[TaskBenchmark],
    deltas: Sequence[float],
    mode: SweepMode | str = SweepMode.KEY_MODELS,
    weights: Mapping[str, float] | None = None,
) -> list[SweepPoint]:
    """Global energy reduction and utility variation per utility-drop budget.

    Efficient models are reselected for each ``delta`` without fallback. When
    the budget admits no model more efficient than the best, the task keeps
    its original traffic and contributes a zero reduction in either mode.
    """
    mode = SweepMode(mode)
    deltas = list(deltas)
    if not deltas:
        raise ScenarioError("deltas must not be empty")
    if any(b < a for a, b in zip(deltas, deltas[1:])):
        raise ScenarioError("deltas must be sorted ascending")
    if weights is None:
        weights = task_weights(benchmarks, WeightPolicy.SUM_OF_MODEL_DOWNLOADS)
    out = []
    for delta in deltas:
        results = []
        for bench in benchmarks:
            pair = select_key_models(bench, delta, allow_fallback=False)
            if mode is SweepMode.KEY_MODELS:
                results.append(run_key_switch(bench, pair))
            elif pair.efficient == pair.best:
                results.append(_unchanged(run_redirect(bench, pair, Policy.REDIRECT_TO_EFFICIENT)))
            else:
                results.append(run_redirect(bench, pair, Policy.REDIRECT_TO_EFFICIENT))
        er, uv = aggregate_weighted(results, weights)
        out.append(SweepPoint(delta, er, uv))
    return out
