"""Energy-aware model selection toolkit.

Load benchmark snapshots of AI models, pick energy-efficient models per
task, fit power-law energy models and estimate the fleet-level savings of
redirecting inference traffic.
"""

from .catalog import (
    EnergySource,
    Field,
    MeasurementRecord,
    ModelRecord,
    ParamsSource,
    SnapshotError,
    TaskBenchmark,
    UsageSource,
    WeightPolicy,
    dumps_snapshot,
    format_params,
    load_bundled_snapshot,
    load_snapshot,
    loads_snapshot,
    parse_params,
    save_snapshot,
    task_weights,
)
from .energy import (
    PowerLawFit,
    compare_measurements,
    estimate_energy,
    fit_power_law,
    fit_task,
    impute_energies,
    within_reported_range,
)
from .hub import FetchMode, UsageFetchError, UsageWarning, fetch_usage
from .projection import (
    BaselineKind,
    ProjectionConfig,
    ProjectionSeries,
    Scenario,
    full_adoption_pessimistic,
    full_adoption_savings,
    project_consumption,
    reactor_equivalents,
)
from .scenarios import (
    Policy,
    ScenarioResult,
    SweepMode,
    SweepPoint,
    aggregate_weighted,
    redirect_downloads,
    run_key_switch,
    run_policy,
    run_redirect,
    sweep_utility_drop,
)
from .selection import (
    FrontierPoint,
    KeyModelPair,
    efficiency,
    goodness,
    pareto_frontier,
    published_key_models,
    select_key_models,
)

__version__ = "0.1.0"
