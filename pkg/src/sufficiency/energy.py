"""Power-law energy models: log10(E) = alpha * log10(P) + beta."""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, replace

from .catalog import EnergySource, MeasurementRecord, TaskBenchmark

# Range of per-task coefficients reported for the two-key-model fits,
# quoted to two decimals for alpha and to the printed precision for beta.
ALPHA_RANGE = (0.27, 0.84)
BETA_RANGE = (-5.89, 1.4)


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class PowerLawFit:
    task_id: str
    alpha: float
    beta: float
    n_points: int
    r2: float
    sse_log: float

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "sse_log"}


def fit_power_law(points: Iterable[tuple[int, float]], task_id: str = "") -> PowerLawFit:
    """Ordinary least squares of log10(energy) on log10(params)."""
    pts = list(points)
    if len(pts) < 2:
        raise FitError(f"need at least 2 points to fit, got {len(pts)}")
    for p, e in pts:
        if p <= 0:
            raise FitError(f"params must be positive, got {p!r}")
        if not e > 0:
            raise FitError(f"energy must be positive, got {e!r}")
    xs = [math.log10(p) for p, _ in pts]
    ys = [math.log10(e) for _, e in pts]
    n = len(pts)
    x_mean = math.fsum(xs) / n
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    if sxx == 0.0:
        raise FitError("all points share the same parameter count; slope undefined")
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    alpha = sxy / sxx
    beta = y_mean - alpha * x_mean
    sse = math.fsum((y - (alpha * x + beta)) ** 2 for x, y in zip(xs, ys))
    syy = math.fsum((y - y_mean) ** 2 for y in ys)
    r2 = 1.0 if syy == 0.0 else min(1.0, max(0.0, 1.0 - sse / syy))
    return PowerLawFit(task_id, alpha, beta, n, r2, sse)


def estimate_energy(fit: PowerLawFit, params: int) -> float:
    return 10.0 ** (fit.beta + fit.alpha * math.log10(params))


def within_reported_range(fit: PowerLawFit) -> bool:
    """True if alpha and beta fall inside the published coefficient range.

    The bounds are printed to two decimals (alpha, lower beta) and one
    decimal (upper beta), so each coefficient is compared after rounding to
    the precision of the bound it is checked against.
    """
    a_lo, a_hi = ALPHA_RANGE
    b_lo, b_hi = BETA_RANGE
    return (
        round(fit.alpha, 2) >= a_lo
        and round(fit.alpha, 2) <= a_hi
        and round(fit.beta, 2) >= b_lo
        and round(fit.beta, 1) <= b_hi
    )


def fit_points(bench: TaskBenchmark, include_estimated: bool = False) -> list[tuple[int, float]]:
    allowed = {EnergySource.MEASURED}
    if include_estimated:
        allowed.add(EnergySource.ESTIMATED)
    return [(m.params, m.energy_j) for m in bench.models if m.energy_source in allowed]


def fit_task(bench: TaskBenchmark, include_estimated: bool = False) -> PowerLawFit:
    """Fit a task's power law from its measured energies.

    Already-estimated energies are left out unless ``include_estimated`` is
    set, so a fit never feeds on its own output.
    """
    return fit_power_law(fit_points(bench, include_estimated), task_id=bench.task_id)


def impute_energies(bench: TaskBenchmark, fit: PowerLawFit) -> TaskBenchmark:
    """Fill absent energies from the fit and flag them as estimated."""
    if fit.task_id and fit.task_id != bench.task_id:
        raise FitError(f"fit for task {fit.task_id!r} applied to task {bench.task_id!r}")
    models = [
        replace(m, energy_j=estimate_energy(fit, m.params), energy_source=EnergySource.ESTIMATED)
        if m.energy_j is None
        else m
        for m in bench.models
    ]
    return bench.with_models(models)


def compare_measurements(pairs: Sequence[tuple[MeasurementRecord, MeasurementRecord]]) -> float:
    """Mean absolute percentage difference of software readings against hardware readings.

    Returned as a fraction (0.03 means 3%).
    """
    if not pairs:
        raise ValueError("compare_measurements needs at least one pair")
    terms = []
    for soft, hard in pairs:
        if soft.model_id != hard.model_id:
            raise ValueError(f"pair mixes models {soft.model_id!r} and {hard.model_id!r}")
        if hard.energy_j == 0:
            raise ValueError(f"hardware energy for {hard.model_id!r} is zero")
        terms.append(abs(soft.energy_j - hard.energy_j) / hard.energy_j)
    return math.fsum(terms) / len(terms)


def dumps_fits(fits: Iterable[PowerLawFit]) -> str:
    return json.dumps([f.to_dict() for f in fits], indent=2) + "\n"


def loads_fits(text: str) -> list[PowerLawFit]:
    """Inverse of :func:`dumps_fits`; ``sse_log`` is not exported and comes back as NaN."""
    return [
        PowerLawFit(d["task_id"], float(d["alpha"]), float(d["beta"]), int(d["n_points"]), float(d["r2"]), math.nan)
        for d in json.loads(text)
    ]
