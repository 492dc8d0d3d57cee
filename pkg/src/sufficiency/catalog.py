"""Benchmark snapshot data model and file I/O.

A snapshot is a list of :class:`TaskBenchmark`, each holding the model
records evaluated on one task. Snapshots are stored as JSON (array of task
objects) or CSV (one row per model, task columns repeated).
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace
from decimal import Decimal, InvalidOperation
from enum import Enum
from pathlib import Path


class SnapshotError(ValueError):
    """Raised when a snapshot cannot be parsed or violates a field constraint."""


class Field(str, Enum):
    LANGUAGE = "language"
    VISION = "vision"
    AUDIO = "audio"
    MULTIMODAL = "multimodal"
    TABULAR = "tabular"


class UsageSource(str, Enum):
    HUB_DOWNLOADS = "hub_downloads"
    HUB_EQUIVALENT = "hub_equivalent"
    WEB_VISITS = "web_visits"


class EnergySource(str, Enum):
    MEASURED = "measured"
    ESTIMATED = "estimated"
    ABSENT = "absent"


class ParamsSource(str, Enum):
    REPORTED = "reported"
    ESTIMATED = "estimated"


class WeightPolicy(str, Enum):
    DECLARED = "declared"
    SUM_OF_MODEL_DOWNLOADS = "sum_of_model_downloads"


@dataclass(frozen=True)
class ModelRecord:
    id: str
    task_id: str
    params: int
    utility: float
    downloads: int
    usage_source: UsageSource = UsageSource.HUB_DOWNLOADS
    energy_j: float | None = None
    energy_source: EnergySource = EnergySource.ABSENT
    params_source: ParamsSource = ParamsSource.REPORTED
    # Published key-model annotation ("best" / "efficient"), if the source table had one.
    role: str | None = None

    def __post_init__(self) -> None:
        if isinstance(self.params, bool) or not isinstance(self.params, int) or self.params < 1:
            raise SnapshotError(f"model {self.id!r}: params must be an integer >= 1, got {self.params!r}")
        if isinstance(self.downloads, bool) or not isinstance(self.downloads, int) or self.downloads < 0:
            raise SnapshotError(f"model {self.id!r}: downloads must be an integer >= 0, got {self.downloads!r}")
        if not math.isfinite(self.utility):
            raise SnapshotError(f"model {self.id!r}: utility must be finite")
        if self.energy_j is not None:
            if not (math.isfinite(self.energy_j) and self.energy_j > 0):
                raise SnapshotError(f"model {self.id!r}: energy_j must be > 0, got {self.energy_j!r}")
            if self.energy_source is EnergySource.ABSENT:
                raise SnapshotError(f"model {self.id!r}: energy_j given but energy_source is 'absent'")
        elif self.energy_source is not EnergySource.ABSENT:
            raise SnapshotError(f"model {self.id!r}: energy_source {self.energy_source.value!r} without energy_j")
        if self.role not in (None, "best", "efficient"):
            raise SnapshotError(f"model {self.id!r}: role must be 'best' or 'efficient', got {self.role!r}")

    @property
    def has_energy(self) -> bool:
        return self.energy_j is not None


@dataclass(frozen=True)
class TaskBenchmark:
    task_id: str
    field: Field
    metric_name: str
    higher_is_better: bool
    models: tuple[ModelRecord, ...] = ()
    lib_ceiling: float | None = None
    # None means "not declared"; see task_weights().
    task_weight: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "models", tuple(self.models))
        if self.task_weight is not None and not (self.task_weight >= 0):
            raise SnapshotError(f"task {self.task_id!r}: task_weight must be >= 0")
        seen = set()
        for m in self.models:
            if m.task_id != self.task_id:
                raise SnapshotError(f"model {m.id!r} has task_id {m.task_id!r}, expected {self.task_id!r}")
            if m.id in seen:
                raise SnapshotError(f"duplicate model {m.id!r} in task {self.task_id!r}")
            seen.add(m.id)

    def model(self, model_id: str) -> ModelRecord:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(f"model {model_id!r} not in task {self.task_id!r}")

    def require_models(self) -> None:
        if not self.models:
            raise SnapshotError(f"task {self.task_id!r} has no models")

    def with_models(self, models: Iterable[ModelRecord]) -> TaskBenchmark:
        return replace(self, models=tuple(models))


@dataclass(frozen=True)
class MeasurementRecord:
    model_id: str
    tool: str  # "software_tracker" | "hardware_meter"
    energy_j: float
    run_index: int = 0

    def __post_init__(self) -> None:
        if self.tool not in ("software_tracker", "hardware_meter"):
            raise ValueError(f"unknown measurement tool {self.tool!r}")
        if not self.energy_j > 0:
            raise ValueError(f"measurement for {self.model_id!r}: energy_j must be > 0")


# ---------------------------------------------------------------------------
# parameter-count suffixes

_SUFFIXES = {"K": 3, "M": 6, "B": 9, "T": 12}


def parse_params(value: str | int | float) -> int:
    """Parse a parameter count such as ``8B``, ``616K``, ``1.5B`` or ``73000000``.

    The result must be an exact integer; ``"1.2345K"`` is rejected.
    """
    if isinstance(value, bool):
        raise ValueError(f"invalid parameter count {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"parameter count {value!r} is not an integer")
        return int(value)
    text = value.strip().replace("_", "").replace(",", "")
    exp = 0
    if text and text[-1].upper() in _SUFFIXES:
        exp = _SUFFIXES[text[-1].upper()]
        text = text[:-1].strip()
    try:
        number = Decimal(text).scaleb(exp)
    except InvalidOperation:
        raise ValueError(f"invalid parameter count {value!r}") from None
    if not number.is_finite() or number != number.to_integral_value():
        raise ValueError(f"parameter count {value!r} is not an integer")
    return int(number)


def format_params(params: int) -> str:
    """Render a parameter count with the largest exact K/M/B/T suffix (``8000000000`` -> ``8B``)."""
    for suffix, exp in sorted(_SUFFIXES.items(), key=lambda kv: -kv[1]):
        if params >= 10**exp:
            scaled = Decimal(params).scaleb(-exp).normalize()
            # normalize() can produce exponent notation, e.g. 1E+1
            return f"{scaled:f}{suffix}"
    return str(params)


# ---------------------------------------------------------------------------
# loading

_TASK_FIELDS = ("task_id", "field", "metric_name", "higher_is_better")
_MODEL_FIELDS = ("id", "params", "utility", "downloads", "usage_source")

CSV_COLUMNS = (
    "task_id", "field", "metric_name", "higher_is_better", "lib_ceiling", "task_weight",
    "id", "params", "utility", "downloads", "usage_source",
    "energy_j", "energy_source", "params_source", "role",
)


def _enum(cls, raw, what: str, where: str):
    try:
        return cls(raw)
    except ValueError:
        allowed = ", ".join(e.value for e in cls)
        raise SnapshotError(f"{where}: invalid {what} {raw!r} (expected one of {allowed})") from None


def _bool(raw, where: str) -> bool:
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, str) and raw.strip().lower() in ("true", "1", "yes"):
        return True
    if isinstance(raw, str) and raw.strip().lower() in ("false", "0", "no"):
        return False
    raise SnapshotError(f"{where}: invalid boolean {raw!r}")


def _float(raw, name: str, where: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise SnapshotError(f"{where}: field {name!r} is not a number: {raw!r}") from None
    return value


def _int(raw, name: str, where: str) -> int:
    if isinstance(raw, bool):
        raise SnapshotError(f"{where}: field {name!r} is not an integer: {raw!r}")
    try:
        if name == "params":
            return parse_params(raw)
        if isinstance(raw, float) and raw.is_integer():
            return int(raw)
        return int(raw)
    except (TypeError, ValueError):
        raise SnapshotError(f"{where}: field {name!r} is not an integer: {raw!r}") from None


def _blank(raw) -> bool:
    return raw is None or (isinstance(raw, str) and raw.strip() == "")


def _model_from_mapping(raw: Mapping, task_id: str, where: str) -> ModelRecord:
    model_id = raw.get("id")
    if _blank(model_id):
        raise SnapshotError(f"{where}: missing required field 'id'")
    label = f"{where} (model {model_id!r})"
    for name in _MODEL_FIELDS[1:]:
        if _blank(raw.get(name)):
            raise SnapshotError(f"{where}: missing required field {name!r} for model {model_id!r}")
    energy = None if _blank(raw.get("energy_j")) else _float(raw["energy_j"], "energy_j", label)
    if _blank(raw.get("energy_source")):
        energy_source = EnergySource.ABSENT if energy is None else EnergySource.MEASURED
    else:
        energy_source = _enum(EnergySource, raw["energy_source"], "energy_source", label)
    params_source = (
        ParamsSource.REPORTED
        if _blank(raw.get("params_source"))
        else _enum(ParamsSource, raw["params_source"], "params_source", label)
    )
    try:
        return ModelRecord(
            id=str(model_id),
            task_id=task_id,
            params=_int(raw["params"], "params", label),
            utility=_float(raw["utility"], "utility", label),
            downloads=_int(raw["downloads"], "downloads", label),
            usage_source=_enum(UsageSource, raw["usage_source"], "usage_source", label),
            energy_j=energy,
            energy_source=energy_source,
            params_source=params_source,
            role=None if _blank(raw.get("role")) else str(raw["role"]),
        )
    except SnapshotError as exc:
        raise SnapshotError(f"{where}: {exc}") from None


def _task_header(raw: Mapping, where: str) -> dict:
    for name in _TASK_FIELDS:
        if _blank(raw.get(name)):
            raise SnapshotError(f"{where}: missing required field {name!r}")
    return dict(
        task_id=str(raw["task_id"]),
        field=_enum(Field, raw["field"], "field", where),
        metric_name=str(raw["metric_name"]),
        higher_is_better=_bool(raw["higher_is_better"], where),
        lib_ceiling=None if _blank(raw.get("lib_ceiling")) else _float(raw["lib_ceiling"], "lib_ceiling", where),
        task_weight=None if _blank(raw.get("task_weight")) else _float(raw["task_weight"], "task_weight", where),
    )


def _build(header: dict, models: list[ModelRecord], where: str) -> TaskBenchmark:
    try:
        return TaskBenchmark(models=tuple(models), **header)
    except SnapshotError as exc:
        raise SnapshotError(f"{where}: {exc}") from None


def _parse_json(text: str) -> list[TaskBenchmark]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, list):
        raise SnapshotError("snapshot JSON must be a top-level array of task objects")
    tasks: list[TaskBenchmark] = []
    seen: set[str] = set()
    for i, raw in enumerate(data):
        where = f"task record {i}"
        if not isinstance(raw, dict):
            raise SnapshotError(f"{where}: expected an object")
        header = _task_header(raw, where)
        if header["task_id"] in seen:
            raise SnapshotError(f"{where}: duplicate task_id {header['task_id']!r}")
        seen.add(header["task_id"])
        raw_models = raw.get("models")
        if raw_models is None:
            raise SnapshotError(f"{where}: missing required field 'models'")
        models = []
        for j, rm in enumerate(raw_models):
            if not isinstance(rm, dict):
                raise SnapshotError(f"{where}, model record {j}: expected an object")
            models.append(_model_from_mapping(rm, header["task_id"], f"{where}, model record {j}"))
        tasks.append(_build(header, models, where))
    return tasks


def _parse_csv(text: str) -> list[TaskBenchmark]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise SnapshotError("CSV snapshot has no header row")
    missing = [c for c in _TASK_FIELDS + ("id",) if c not in reader.fieldnames]
    if missing:
        raise SnapshotError(f"CSV header is missing required column(s): {', '.join(missing)}")
    headers: dict[str, dict] = {}
    models: dict[str, list[ModelRecord]] = {}
    order: list[str] = []
    try:
        for row in reader:
            where = f"line {reader.line_num}"
            if None in row:
                raise SnapshotError(f"{where}: more fields than header columns")
            header = _task_header(row, where)
            tid = header["task_id"]
            if tid not in headers:
                headers[tid] = header
                models[tid] = []
                order.append(tid)
            elif headers[tid] != header:
                raise SnapshotError(f"{where}: task columns for {tid!r} disagree with an earlier row")
            if _blank(row.get("id")):
                continue  # placeholder row for a task without models
            rec = _model_from_mapping(row, tid, where)
            if any(m.id == rec.id for m in models[tid]):
                raise SnapshotError(f"{where}: duplicate model {rec.id!r} in task {tid!r}")
            models[tid].append(rec)
    except csv.Error as exc:
        raise SnapshotError(f"CSV parse error at line {reader.line_num}: {exc}") from None
    return [_build(headers[t], models[t], f"task {t!r}") for t in order]


def loads_snapshot(text: str, format: str = "json") -> list[TaskBenchmark]:
    if format == "json":
        return _parse_json(text)
    if format == "csv":
        return _parse_csv(text)
    raise ValueError(f"unknown snapshot format {format!r}")


def load_snapshot(path: str | Path, format: str | None = None) -> list[TaskBenchmark]:
    """Load a snapshot file. ``format`` defaults to the file extension."""
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    text = path.read_text(encoding="utf-8")
    return loads_snapshot(text, fmt)


# ---------------------------------------------------------------------------
# saving

def _model_dict(m: ModelRecord) -> dict:
    out: dict = {
        "id": m.id,
        "params": m.params,
        "utility": m.utility,
        "downloads": m.downloads,
        "usage_source": m.usage_source.value,
    }
    if m.energy_j is not None:
        out["energy_j"] = m.energy_j
    out["energy_source"] = m.energy_source.value
    out["params_source"] = m.params_source.value
    if m.role is not None:
        out["role"] = m.role
    return out


def _task_dict(t: TaskBenchmark) -> dict:
    out: dict = {
        "task_id": t.task_id,
        "field": t.field.value,
        "metric_name": t.metric_name,
        "higher_is_better": t.higher_is_better,
    }
    if t.lib_ceiling is not None:
        out["lib_ceiling"] = t.lib_ceiling
    if t.task_weight is not None:
        out["task_weight"] = t.task_weight
    out["models"] = [_model_dict(m) for m in t.models]
    return out


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)


def dumps_snapshot(benchmarks: Iterable[TaskBenchmark], format: str = "json") -> str:
    benchmarks = list(benchmarks)
    if format == "json":
        return json.dumps([_task_dict(t) for t in benchmarks], indent=2) + "\n"
    if format != "csv":
        raise ValueError(f"unknown snapshot format {format!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for t in benchmarks:
        task_cells = [t.task_id, t.field, t.metric_name, t.higher_is_better, t.lib_ceiling, t.task_weight]
        if not t.models:
            writer.writerow([_cell(v) for v in task_cells] + [""] * 9)
        for m in t.models:
            model_cells = [
                m.id, m.params, m.utility, m.downloads, m.usage_source,
                m.energy_j, m.energy_source, m.params_source, m.role,
            ]
            writer.writerow([_cell(v) for v in task_cells + model_cells])
    return buf.getvalue()


def save_snapshot(benchmarks: Iterable[TaskBenchmark], path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or path.suffix.lstrip(".").lower()
    path.write_text(dumps_snapshot(benchmarks, fmt), encoding="utf-8")


# ---------------------------------------------------------------------------
# usage weights

def task_weights(
    benchmarks: Iterable[TaskBenchmark],
    policy: WeightPolicy | str = WeightPolicy.SUM_OF_MODEL_DOWNLOADS,
) -> dict[str, float]:
    """Cross-task aggregation weights keyed by task id.

    ``declared`` returns each task's stored ``task_weight``; the fallback
    policy sums the downloads of the task's models.
    """
    policy = WeightPolicy(policy)
    benchmarks = list(benchmarks)
    if not benchmarks:
        raise ValueError("task_weights needs at least one benchmark")
    weights: dict[str, float] = {}
    for t in benchmarks:
        if policy is WeightPolicy.DECLARED:
            if t.task_weight is None:
                raise ValueError(f"task {t.task_id!r} has no declared task_weight")
            weights[t.task_id] = float(t.task_weight)
        else:
            weights[t.task_id] = float(sum(m.downloads for m in t.models))
    if not any(w > 0 for w in weights.values()):
        raise ValueError("all task weights are zero; weighted aggregation is undefined")
    return weights


def bundled_snapshot_path() -> Path:
    """Path of the shipped key-model fixture."""
    return Path(__file__).with_name("data") / "key_models.json"


def load_bundled_snapshot() -> list[TaskBenchmark]:
    return load_snapshot(bundled_snapshot_path(), "json")


__all__ = [
    "CSV_COLUMNS", "EnergySource", "Field", "MeasurementRecord", "ModelRecord", "ParamsSource",
    "SnapshotError", "TaskBenchmark", "UsageSource", "WeightPolicy", "bundled_snapshot_path",
    "dumps_snapshot", "format_params", "load_bundled_snapshot", "load_snapshot", "loads_snapshot",
    "parse_params", "save_snapshot", "task_weights",
]
