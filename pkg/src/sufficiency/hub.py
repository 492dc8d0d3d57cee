"""Refresh monthly download counts from a model-hub REST API.

Only records whose ``usage_source`` is ``hub_downloads`` are refreshed;
web-visit and hub-equivalent counts come from elsewhere and are left alone.
"""

from __future__ import annotations

import json
import logging
import os
import urllib.error
import urllib.parse
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

from .catalog import TaskBenchmark, UsageSource

log = logging.getLogger(__name__)

ENDPOINT_ENV = "SUFFICIENCY_HUB_ENDPOINT"
DEFAULT_ENDPOINT = "https://huggingface.co/api/models"


class FetchMode(str, Enum):
    OFFLINE = "offline"
    REFRESH = "refresh"


class UsageFetchError(RuntimeError):
    """No model could be refreshed from the hub endpoint."""


@dataclass(frozen=True)
class UsageWarning:
    model_id: str
    message: str


def model_url(endpoint: str, model_id: str) -> str:
    quoted = urllib.parse.quote(model_id, safe="/")
    if "{model_id}" in endpoint:
        return endpoint.replace("{model_id}", quoted)
    return endpoint.rstrip("/") + "/" + quoted


def _get_downloads(url: str, timeout: float) -> int:
    req = urllib.request.Request(url, headers={"Accept": "application/json"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        payload = json.loads(resp.read().decode("utf-8"))
    downloads = payload.get("downloads") if isinstance(payload, dict) else None
    if isinstance(downloads, bool) or not isinstance(downloads, int) or downloads < 0:
        raise ValueError(f"response has no non-negative integer 'downloads' field: {payload!r:.200}")
    return downloads


def fetch_usage(
    benchmarks: list[TaskBenchmark],
    endpoint: str | None = None,
    mode: FetchMode | str = FetchMode.OFFLINE,
    *,
    timeout: float = 10.0,
    max_workers: int = 8,
    warnings: list[UsageWarning] | None = None,
) -> list[TaskBenchmark]:
    """Return benchmarks with hub download counts refreshed.

    In offline mode the input is returned unchanged. In refresh mode each
    distinct hub model id is queried once (concurrently); a failed or
    malformed response keeps the prior count and appends a
    :class:`UsageWarning` to ``warnings`` (if given). Raises
    :class:`UsageFetchError` when refresh was attempted for at least one
    model and none succeeded.
    """
    mode = FetchMode(mode)
    if mode is FetchMode.OFFLINE:
        return list(benchmarks)
    endpoint = endpoint or os.environ.get(ENDPOINT_ENV) or DEFAULT_ENDPOINT

    ids = sorted({
        m.id for t in benchmarks for m in t.models if m.usage_source is UsageSource.HUB_DOWNLOADS
    })
    if not ids:
        return list(benchmarks)

    def fetch(model_id: str) -> tuple[str, int | None, str | None]:
        try:
            return model_id, _get_downloads(model_url(endpoint, model_id), timeout), None
        except urllib.error.HTTPError as exc:
            return model_id, None, f"HTTP {exc.code} from hub"
        except (urllib.error.URLError, OSError) as exc:
            return model_id, None, f"hub unreachable: {exc}"
        except ValueError as exc:
            return model_id, None, f"malformed hub response: {exc}"

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(fetch, ids))

    fresh: dict[str, int] = {}
    for model_id, downloads, error in results:  # already sorted by id
        if error is None:
            fresh[model_id] = downloads
        else:
            log.warning("usage refresh failed for %s: %s", model_id, error)
            if warnings is not None:
                warnings.append(UsageWarning(model_id, error))
    if not fresh:
        raise UsageFetchError(f"could not refresh any of {len(ids)} model(s) from {endpoint}")

    out = []
    for t in benchmarks:
        models = [
            replace(m, downloads=fresh[m.id])
            if m.usage_source is UsageSource.HUB_DOWNLOADS and m.id in fresh
            else m
            for m in t.models
        ]
        out.append(t.with_models(models))
    return out
