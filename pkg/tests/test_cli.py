import csv
import json

import pytest

from sufficiency.catalog import load_snapshot, save_snapshot
from sufficiency.cli import main
from sufficiency.energy import loads_fits

from conftest import make_task


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def unique_best(tmp_path):
    path = tmp_path / "unique.json"
    save_snapshot([
        make_task([("a1", 1, 90.0, 1.0, 10), ("a2", 10, 100.0, 5.0, 30)], task_id="A"),
        make_task([("b1", 2, 50.0, 2.0, 5), ("b2", 8, 70.0, 8.0, 4)], task_id="B"),
    ], path)
    return path


def test_validate_bundled(capsys):
    assert main(["validate"]) == 0
    assert "14 task(s), 28 model(s): ok" in capsys.readouterr().out


def test_select_writes_one_row_per_task(tmp_path):
    assert main(["select", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "key_models.csv")
    assert len(rows) == 14
    speech = next(r for r in rows if r["task_id"] == "speech_recognition")
    assert (speech["efficient_id"], speech["best_id"]) == ("openai/whisper-base.en", "nvidia/canary-1b")
    assert speech["fallback_used"] == "true" and speech["matches_published"] == "true"
    assert len(json.loads((tmp_path / "key_models.json").read_text())) == 14


def test_savings_key_switch_speech_only(tmp_path, fixture_by_id):
    snap = tmp_path / "speech.csv"
    save_snapshot([fixture_by_id["speech_recognition"]], snap)
    assert main(["savings", "--snapshot", str(snap), "--out", str(tmp_path), "--policy", "key_switch"]) == 0
    report = json.loads((tmp_path / "savings.json").read_text())
    assert report["results"][0]["er"] == pytest.approx(0.806, abs=1e-3)
    assert report["aggregate"]["er_global"] == pytest.approx(0.806, abs=1e-3)
    rows = read_csv(tmp_path / "savings.csv")
    assert [r["task_id"] for r in rows] == ["speech_recognition", "__global__"]


def test_sweep_zero_delta(tmp_path, unique_best):
    assert main(["sweep", "--snapshot", str(unique_best), "--deltas", "0", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert [float(r["er_global"]) for r in rows] == [0.0]


def test_sweep_default_grid_is_monotone(tmp_path):
    for mode in ("key_models", "all_models"):
        assert main(["sweep", "--mode", mode, "--format", "csv", "--out", str(tmp_path)]) == 0
        ers = [float(r["er_global"]) for r in read_csv(tmp_path / "sweep.csv")]
        assert ers == sorted(ers)
        assert not (tmp_path / "sweep.json").exists()


def test_project_requires_config(tmp_path):
    assert main(["project", "--out", str(tmp_path)]) == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["frobnicate"]) == 64
    assert main([]) == 64
    assert main(["select", "--delta", "3"]) == 64
    assert main(["select", "--format", "xml"]) == 64
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps([{"task_id": "x", "field": "language", "metric_name": "m",
                                  "higher_is_better": True, "models": []}]))
    assert main(["validate", "--snapshot", str(empty)]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text("[{")
    assert main(["select", "--snapshot", str(broken)]) == 1
    assert main(["select", "--snapshot", str(tmp_path / "missing.json")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["select", "--out", str(blocker / "sub")]) == 2
    capsys.readouterr()


def _report(out, projection):
    assert main(["report", "--out", str(out), "--projection", str(projection)]) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_report_is_deterministic_and_reloadable(tmp_path):
    from importlib.resources import files
    projection = files("sufficiency") / "data" / "projection_us.json"
    first = _report(tmp_path / "a", projection)
    second = _report(tmp_path / "b", projection)
    assert first == second
    expected = {"report.json", "fits.json", "fits.csv", "frontier.csv", "key_models.json", "projection.csv",
                "savings_key_switch.csv", "savings_redirect_to_best.json", "sweep_all_models.csv"}
    assert expected <= set(first)
    bundle = json.loads(first["report.json"])
    assert set(bundle["savings"]) == {"key_switch", "redirect_to_efficient", "redirect_to_best"}
    assert "text_to_image" in bundle["unfitted_tasks"]
    fits = loads_fits(first["fits.json"].decode())
    assert {f.task_id for f in fits} >= {"image_classification", "translation"}
    proj = read_csv(tmp_path / "a" / "projection.csv")
    assert list(proj[0]) == ["year", "scenario", "low_twh", "high_twh"]
    summary = bundle["projection_summary"]["full_adoption_savings"]["2025"]
    assert summary["savings_low_twh"] == pytest.approx(16.25, abs=0.01)
    assert summary["pessimistic_low_twh"] == pytest.approx(123.4, abs=0.1)


def test_refresh_usage_uses_endpoint(tmp_path, monkeypatch):
    monkeypatch.setenv("SUFFICIENCY_HUB_ENDPOINT", "http://127.0.0.1:9")
    assert main(["select", "--refresh-usage", "--out", str(tmp_path)]) == 1


def test_snapshot_round_trip_via_cli_output(tmp_path, fixture_tasks):
    snap = tmp_path / "t2.csv"
    save_snapshot(fixture_tasks, snap)
    assert load_snapshot(snap) == fixture_tasks
    assert main(["frontier", "--snapshot", str(snap), "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "frontier.csv")
