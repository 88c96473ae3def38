import csv
import json

import pytest

from dlbmt import cli
from dlbmt.errors import SimulationError
from dlbmt.scenario import ENV_SCENARIO_DIR, bundled_dir


def _atlanta_doc():
    return json.loads((bundled_dir() / "atlanta.json").read_text())


def test_run_writes_series_and_summary(tmp_path, capsys):
    rc = cli.main(["run", "--scenario", "atlanta.json", "--strategy", "dlbmt", "--seed", "7",
                   "--ticks", "120", "--out", str(tmp_path)])
    assert rc == 0
    rows = list(csv.reader((tmp_path / "dlbmt-7.csv").open()))
    header = rows[0]
    assert header[0] == "tick" and header[-7:] == ["mean_rt_ms", "imbalance", "balancing_rate",
                                                  "cum_cost", "cum_msgs", "migrations", "active_controllers"]
    assert [h for h in header if h.startswith("load_")][:3] == ["load_c1", "load_c2", "load_c3"]
    assert len(rows) == 121
    float(rows[1][header.index("mean_rt_ms")])
    summary = json.loads((tmp_path / "summary.json").read_text())
    run = summary["runs"]["dlbmt-7"]
    assert run["ticks"] == 120 and set(run) >= {"means", "totals", "final"}
    assert "dlbmt-7" in capsys.readouterr().out


def test_run_json_and_override(tmp_path):
    rc = cli.main(["run", "--scenario", "atlanta", "--seeds", "1,2", "--ticks", "30",
                   "--set", "workload.jitter=0.2", "--format", "json", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["workload"]["jitter"] == 0.2
    assert set(summary["runs"]) == {"dlbmt-1", "dlbmt-2"}
    rows = json.loads((tmp_path / "dlbmt-1.json").read_text())
    assert len(rows) == 30 and rows[0]["levels"]["c1"] in ("IDLE", "NORMAL", "HIGH_LOAD", "OVERLOAD")


def test_missing_scenario(tmp_path, capsys):
    rc = cli.main(["run", "--scenario", str(tmp_path / "nowhere.json"), "--out", str(tmp_path)])
    assert rc == 1
    err = capsys.readouterr().err
    assert "nowhere.json" in err


def test_bad_override(tmp_path, capsys):
    assert cli.main(["run", "--scenario", "atlanta", "--set", "bogus=1", "--out", str(tmp_path)]) == 1
    assert cli.main(["run", "--scenario", "atlanta", "--set", "workload.jitter=3", "--out", str(tmp_path)]) == 1
    assert "jitter" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run"])
    assert exc.value.code == 1


def test_compare_table(capsys):
    rc = cli.main(["compare", "--scenario", "germany50", "--strategy", "dlbmt",
                   "--strategy", "single-threshold", "--seeds", "0,1", "--ticks", "200"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "imbalance" in out and "dlbmt vs single-threshold %" in out


def test_compare_needs_two_strategies(capsys):
    assert cli.main(["compare", "--scenario", "atlanta", "--strategy", "dlbmt"]) == 1
    assert "two strategies" in capsys.readouterr().err


def test_compare_self_is_zero(capsys):
    rc = cli.main(["compare", "--scenario", "atlanta", "--strategies", "dlbmt,dlbmt",
                   "--seeds", "3", "--ticks", "100", "--format", "json"])
    assert rc == 0
    comp = json.loads(capsys.readouterr().out)
    assert set(comp["means"]) == {"dlbmt", "dlbmt#2"}
    assert all(v in (0.0, None) for v in comp["improvement_pct"]["dlbmt#2"].values())


def test_compare_csv(capsys, tmp_path):
    rc = cli.main(["compare", "--scenario", "atlanta", "--strategy", "dlbmt", "--strategy", "single",
                   "--ticks", "50", "--format", "csv", "--out", str(tmp_path)])
    assert rc == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0][0] == "row" and rows[-1][0] == "improvement_vs_single-threshold"
    assert (tmp_path / "comparison.json").is_file()


def test_validate_atlanta(capsys):
    assert cli.main(["validate", "--scenario", "atlanta"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("15 nodes, 22 edges, 3 controllers (cap 2000)")


def test_validate_failures(tmp_path, capsys):
    doc = _atlanta_doc()
    doc["edges"] = [e for e in doc["edges"] if doc["nodes"][0] not in e]
    (tmp_path / "split.json").write_text(json.dumps(doc))
    assert cli.main(["validate", "--scenario", str(tmp_path / "split.json")]) == 1
    assert "graph not connected" in capsys.readouterr().err

    doc = _atlanta_doc()
    doc["controllers"][1]["capacity"]["mem"] = -5
    (tmp_path / "neg.json").write_text(json.dumps(doc))
    assert cli.main(["validate", "--scenario", str(tmp_path / "neg.json")]) == 1
    assert "c2" in capsys.readouterr().err


def test_scenario_dir_env(tmp_path, monkeypatch, capsys):
    doc = _atlanta_doc()
    doc["ticks"] = 5
    (tmp_path / "mine.json").write_text(json.dumps(doc))
    monkeypatch.setenv(ENV_SCENARIO_DIR, str(tmp_path))
    assert cli.main(["validate", "--scenario", "mine"]) == 0
    assert "15 nodes" in capsys.readouterr().out


def test_runtime_error_exit_code(tmp_path, monkeypatch, capsys):
    def fail(self):
        raise SimulationError(4, RuntimeError("exploded"))

    monkeypatch.setattr(cli.Simulation, "run", fail)
    assert cli.main(["run", "--scenario", "atlanta", "--out", str(tmp_path)]) == 2
    assert "tick 4" in capsys.readouterr().err


def test_import_graphml(tmp_path, capsys):
    path = tmp_path / "t.graphml"
    path.write_text('<graphml><graph><node id="a"/><node id="b"/><edge source="a" target="b"/></graph></graphml>')
    assert cli.main(["import-graphml", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["edges"] == [["a", "b"]]
