import numpy as np
import pytest

from dlbmt.fleet import Fleet
from dlbmt.load_model import CapacityVector, Weights, demands_for_tick
from dlbmt.scenario import load_scenario
from dlbmt.simulator import Simulation
from dlbmt.topology import ControllerSpec, NetworkGraph, SwitchSpec

_ACCEPTANCE_LINES = []


def record_acceptance(line: str):
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_fleet(nodes, edges, controllers, switches, demands, *, background=None,
               assignment=None, weights=Weights()):
    """Fleet with explicit demands and levels classified from them.

    ``controllers`` holds (id, site, capacity or (cpu, mem, bw), active);
    ``switches`` holds (id, site); ``demands`` maps switch id to (cpu, mem, bw).
    """
    specs = []
    for cid, site, cap, active in controllers:
        if not isinstance(cap, tuple):
            cap = (cap, cap, cap)
        specs.append(ControllerSpec(cid, site, *map(float, cap), initially_active=active))
    sw_specs = [SwitchSpec(s, site) for s, site in switches]
    fleet = Fleet(NetworkGraph(tuple(nodes), tuple(edges)), specs, sw_specs, weights,
                  background=background, assignment=assignment)
    arr = np.array([demands.get(s, (0.0, 0.0, 0.0)) for s, _ in switches], dtype=np.float64).reshape(-1, 3)
    fleet.set_demands(arr)
    for c in fleet.active():
        c.level = fleet.classify(c.load)
    return fleet


def prepared_fleet(config, tick=0):
    """A simulation's fleet with tick demands loaded and levels set, before balancing."""
    sim = Simulation(config)
    demands = demands_for_tick(config.workload, tick)
    sim.fleet.set_demands(demands)
    for c in sim.fleet.active():
        c.level = sim.fleet.classify(c.load)
    return sim.fleet


@pytest.fixture
def worked_fleet():
    return prepared_fleet(load_scenario("worked_example"))


def cap(v):
    return CapacityVector(v, v, v)
