import math

import pytest

from dlbmt.errors import DLBMTError, SimulationError, ValidationError
from dlbmt.report import series_csv
from dlbmt.scenario import config_from_dict, load_scenario
from dlbmt.simulator import (Simulation, balancing_rate, baseline_single_threshold,
                             network_imbalance, response_time, run)
from dlbmt.migration import imbalance_degree
from dlbmt.threshold import LoadLevel
from tests.conftest import make_fleet


def scenario(switch_rates, *, controllers=None, **extra):
    """Line-graph scenario document; every switch sits one hop from c1."""
    n = max(len(switch_rates), 2)
    nodes = ["A"] + [f"N{i}" for i in range(1, n + 1)] + ["Z"]
    edges = [[nodes[i], nodes[i + 1]] for i in range(len(nodes) - 1)]
    controllers = controllers or [
        {"id": "c1", "site": "A", "capacity": {"cpu": 100, "mem": 100, "bw": 100}},
        {"id": "c2", "site": "Z", "capacity": {"cpu": 100, "mem": 100, "bw": 100}},
    ]
    doc = {
        "nodes": nodes, "edges": edges, "controllers": controllers,
        "switches": [{"id": f"s{i + 1}", "site": "A"} for i in range(len(switch_rates))],
        "workload": {"rates": {f"s{i + 1}": r for i, r in enumerate(switch_rates)}, "jitter": 0.0},
        "ticks": 50,
    }
    doc.update(extra)
    return doc


def test_response_time():
    assert response_time(0) == 2.0
    assert response_time(50, 2, 1) == pytest.approx(4.0)
    values = [response_time(x) for x in range(100)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert math.isfinite(response_time(100))


def test_network_imbalance():
    assert network_imbalance([30, 30, 30]) == 0
    assert network_imbalance([60, 40]) == pytest.approx(0.2)
    assert network_imbalance([0, 0]) == 0
    for a, b in [(10, 70), (33, 34), (90, 5)]:
        assert network_imbalance([a, b]) == pytest.approx(imbalance_degree(a, b, (a + b) / 2))
    with pytest.raises(ValueError):
        network_imbalance([])


def test_balancing_rate():
    assert balancing_rate([LoadLevel.NORMAL] * 3) == 1.0
    assert balancing_rate([LoadLevel.OVERLOAD, LoadLevel.NORMAL, LoadLevel.IDLE]) == pytest.approx(1 / 3)


def test_baseline_rule_fires_above_threshold():
    nodes, edges = ["A", "B"], [("A", "B")]
    ctrls = [("c1", "A", 100, True), ("c2", "B", 100, True)]
    sws = [("s1", "A"), ("s2", "A")]
    f = make_fleet(nodes, edges, ctrls, sws, {"s1": (50, 50, 50), "s2": (30, 30, 30)},
                   assignment={"s1": "c1", "s2": "c1"})
    plan = baseline_single_threshold(f, "c1")
    assert (plan.switch, plan.target) == ("s1", "c2")
    f = make_fleet(nodes, edges, ctrls, sws, {"s1": (40, 40, 40), "s2": (30, 30, 30)},
                   assignment={"s1": "c1", "s2": "c1"})
    assert baseline_single_threshold(f, "c1") is None


def test_single_controller_steady_state():
    doc = scenario([40.0], controllers=[{"id": "c1", "site": "A", "capacity": {"cpu": 100, "mem": 100, "bw": 100}}])
    records = run(config_from_dict(doc))
    assert [r.loads["c1"] for r in records] == [pytest.approx(40)] * 50
    assert sum(r.migrations for r in records) == 0
    assert sum(r.notifications for r in records[1:]) == 0
    assert {r.levels["c1"] for r in records} == {LoadLevel.NORMAL}


def test_determinism_atlanta():
    a = run(load_scenario("atlanta", seed=7, ticks=300))
    b = run(load_scenario("atlanta", seed=7, ticks=300))
    assert series_csv(a) == series_csv(b)
    c = run(load_scenario("atlanta", seed=8, ticks=300))
    assert series_csv(a) != series_csv(c)


def test_record_invariants_and_accounting():
    for strategy in ("dlbmt", "single-threshold"):
        sim = Simulation(load_scenario("arn", strategy=strategy, ticks=400))
        records = sim.run()
        for prev, cur in zip(records, records[1:]):
            assert cur.cum_cost >= prev.cum_cost and cur.cum_msgs >= prev.cum_msgs
        assert all(0 <= r.balancing_rate <= 1 for r in records)
        notes = sum(r.notifications for r in records)
        assert records[-1].cum_msgs == notes + 6 * records[-1].cum_migrations


def test_ping_pong_baseline_migrates_more():
    # one dominant switch: the baseline bounces it between controllers every tick
    doc = scenario([60.0, 10.0, 10.0], background={"c2": 20}, enable_scale_out=False, enable_shutdown=False)
    base = Simulation(config_from_dict(dict(doc, strategy="single-threshold")))
    base.run()
    ours = Simulation(config_from_dict(dict(doc, strategy="dlbmt")))
    ours.run()
    assert base.cum_migrations > ours.cum_migrations
    assert base.cum_migrations >= 40
    assert ours.unsafe_migrations == 0


def test_scale_out_disabled_keeps_fleet():
    doc = scenario([50.0, 50.0], enable_scale_out=False,
                   controllers=[{"id": "c1", "site": "A", "capacity": {"cpu": 100, "mem": 100, "bw": 100}},
                                {"id": "c2", "site": "Z", "capacity": {"cpu": 100, "mem": 100, "bw": 100},
                                 "active": False}])
    records = run(config_from_dict(doc))
    assert {r.active_controllers for r in records} == {1}


def test_errors_carry_tick(monkeypatch):
    sim = Simulation(config_from_dict(scenario([10.0, 10.0])))
    calls = []

    def boom():
        calls.append(1)
        if len(calls) == 3:
            raise DLBMTError("broken domain")

    monkeypatch.setattr(sim.fleet, "check_totality", boom)
    with pytest.raises(SimulationError, match="tick 2: broken domain"):
        sim.run()


@pytest.mark.parametrize("changes", [{"ticks": 0}, {"strategy": "nope"}, {"background": {"c9": 5}}])
def test_config_validation(changes):
    with pytest.raises(ValidationError):
        config_from_dict(scenario([10.0], **changes))


def test_balance_cadence():
    doc = scenario([60.0, 10.0, 10.0], background={"c2": 20}, strategy="single-threshold",
                   balance_every_n_ticks=5)
    records = run(config_from_dict(doc))
    assert all(r.migrations == 0 for r in records if r.tick % 5)
    assert sum(r.migrations for r in records) == 10
