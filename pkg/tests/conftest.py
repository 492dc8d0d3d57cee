from __future__ import annotations

import pytest

from sufficiency.catalog import (
    EnergySource,
    Field,
    ModelRecord,
    TaskBenchmark,
    UsageSource,
    load_bundled_snapshot,
)


def make_task(rows, task_id="t", higher_is_better=True, lib_ceiling=None, task_weight=None):
    """Build a task from (id, params, utility[, energy[, downloads]]) tuples."""
    models = []
    for row in rows:
        mid, params, utility, *rest = row
        energy = rest[0] if len(rest) > 0 else None
        downloads = rest[1] if len(rest) > 1 else 0
        models.append(ModelRecord(
            id=mid,
            task_id=task_id,
            params=params,
            utility=utility,
            downloads=downloads,
            usage_source=UsageSource.HUB_DOWNLOADS,
            energy_j=energy,
            energy_source=EnergySource.ABSENT if energy is None else EnergySource.MEASURED,
        ))
    return TaskBenchmark(
        task_id=task_id,
        field=Field.LANGUAGE,
        metric_name="score",
        higher_is_better=higher_is_better,
        models=tuple(models),
        lib_ceiling=lib_ceiling,
        task_weight=task_weight,
    )


@pytest.fixture(scope="session")
def fixture_tasks():
    return load_bundled_snapshot()


@pytest.fixture(scope="session")
def fixture_by_id(fixture_tasks):
    return {t.task_id: t for t in fixture_tasks}
