"""Year-by-year AI inference energy projections under three adoption scenarios."""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class BaselineKind(str, Enum):
    DATACENTER_TOTAL = "datacenter_total"
    AI_INFERENCE = "ai_inference"


class Scenario(str, Enum):
    BUSINESS_AS_USUAL = "business_as_usual"
    SOBRIETY = "sobriety"
    PESSIMISTIC = "pessimistic"


class ProjectionError(ValueError):
    pass


Bounds = tuple[float, float]


@dataclass(frozen=True)
class ProjectionConfig:
    """Inputs for :func:`project_consumption`.

    ``increase_rate`` is the multiplier applied to the baseline once every
    request runs on the best-performing model (2.112 means +111.2%).
    """

    baseline: Mapping[int, Bounds]
    baseline_kind: BaselineKind = BaselineKind.AI_INFERENCE
    ai_fraction: float = 0.22
    inference_fraction: float = 0.60
    savings_rate: float = 0.278
    increase_rate: float = 2.112
    transition: tuple[int, int] = (2025, 2026)
    twh_per_reactor: float = 8.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "baseline_kind", BaselineKind(self.baseline_kind))
        baseline = {int(y): (float(lo), float(hi)) for y, (lo, hi) in self.baseline.items()}
        object.__setattr__(self, "baseline", dict(sorted(baseline.items())))
        object.__setattr__(self, "transition", (int(self.transition[0]), int(self.transition[1])))
        for name in ("ai_fraction", "inference_fraction", "savings_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ProjectionError(f"{name} must be in [0, 1], got {getattr(self, name)}")
        if self.increase_rate < 0:
            raise ProjectionError(f"increase_rate must be >= 0, got {self.increase_rate}")
        start, end = self.transition
        if not start < end:
            raise ProjectionError(f"transition start {start} must precede end {end}")
        for year, (lo, hi) in self.baseline.items():
            if lo < 0 or hi < lo:
                raise ProjectionError(f"baseline {year}: need 0 <= low <= high, got ({lo}, {hi})")

    @classmethod
    def from_dict(cls, data: Mapping) -> ProjectionConfig:
        raw = data["baseline"]
        baseline = {}
        for year, value in raw.items():
            if isinstance(value, Mapping):
                baseline[int(year)] = (value["low"], value["high"])
            elif isinstance(value, (int, float)):
                baseline[int(year)] = (value, value)
            else:
                baseline[int(year)] = tuple(value)
        kwargs = {k: data[k] for k in (
            "baseline_kind", "ai_fraction", "inference_fraction", "savings_rate",
            "increase_rate", "twh_per_reactor",
        ) if k in data}
        if "transition" in data:
            kwargs["transition"] = tuple(data["transition"])
        return cls(baseline=baseline, **kwargs)

    @classmethod
    def load(cls, path: str | Path) -> ProjectionConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ProjectionError(f"{path}: JSON parse error at line {exc.lineno}: {exc.msg}") from None
        try:
            return cls.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ProjectionError):
                raise
            raise ProjectionError(f"{path}: invalid projection config: {exc}") from None


@dataclass(frozen=True)
class ProjectionSeries:
    scenario: Scenario
    points: dict[int, Bounds] = field(default_factory=dict)


def transition_share(year: int, transition: tuple[int, int]) -> float:
    """Fraction of traffic migrated by ``year``: 0 before the window, 1 after, linear in between."""
    start, end = transition
    if year <= start:
        return 0.0
    if year >= end:
        return 1.0
    return (year - start) / (end - start)


def inference_baseline(cfg: ProjectionConfig) -> dict[int, Bounds]:
    if cfg.baseline_kind is BaselineKind.AI_INFERENCE:
        return dict(cfg.baseline)
    k = cfg.ai_fraction * cfg.inference_fraction
    return {y: (lo * k, hi * k) for y, (lo, hi) in cfg.baseline.items()}


def _check_coverage(cfg: ProjectionConfig) -> None:
    start, end = cfg.transition
    missing = [y for y in range(start, end + 1) if y not in cfg.baseline]
    if missing:
        raise ProjectionError(f"baseline is missing transition year(s): {', '.join(map(str, missing))}")


def project_consumption(cfg: ProjectionConfig) -> list[ProjectionSeries]:
    """Business-as-usual, sobriety and pessimistic series, in that order."""
    _check_coverage(cfg)
    base = inference_baseline(cfg)
    bau, sob, pes = {}, {}, {}
    for year, (lo, hi) in base.items():
        phi = transition_share(year, cfg.transition)
        down = 1.0 - cfg.savings_rate * phi
        up = 1.0 + (cfg.increase_rate - 1.0) * phi
        bau[year] = (lo, hi)
        sob[year] = (lo * down, hi * down)
        pes[year] = (lo * up, hi * up)
    return [
        ProjectionSeries(Scenario.BUSINESS_AS_USUAL, bau),
        ProjectionSeries(Scenario.SOBRIETY, sob),
        ProjectionSeries(Scenario.PESSIMISTIC, pes),
    ]


def _base_year(cfg: ProjectionConfig, year: int) -> Bounds:
    base = inference_baseline(cfg)
    if year not in base:
        raise ProjectionError(f"baseline has no value for {year}")
    return base[year]


def full_adoption_savings(cfg: ProjectionConfig, year: int) -> Bounds:
    """TWh saved in ``year`` if every request already ran on its efficient model."""
    lo, hi = _base_year(cfg, year)
    return lo * cfg.savings_rate, hi * cfg.savings_rate


def full_adoption_pessimistic(cfg: ProjectionConfig, year: int) -> Bounds:
    """TWh consumed in ``year`` if every request already ran on its best-performing model."""
    lo, hi = _base_year(cfg, year)
    return lo * cfg.increase_rate, hi * cfg.increase_rate


def reactor_equivalents(twh: float, cfg: ProjectionConfig | None = None, *, twh_per_reactor: float | None = None) -> float:
    """Number of reactors whose annual output equals ``twh``."""
    per = twh_per_reactor if twh_per_reactor is not None else (cfg.twh_per_reactor if cfg else 8.1)
    if per <= 0:
        raise ProjectionError(f"twh_per_reactor must be > 0, got {per}")
    if twh < 0:
        raise ProjectionError(f"twh must be >= 0, got {twh}")
    return twh / per

