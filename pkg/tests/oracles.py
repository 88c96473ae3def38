"""Brute-force reference implementations used by the planner tests.

They rebuild every quantity from the instance description (networkx
distances, shares recomputed from demands, exact rational DC/theta) and
enumerate all (switch, target) pairs or all evacuation placements.
"""
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from tests.conftest import make_fleet

SCALE = 2 ** 32
BOUNDS = (25, 50, 75, 100)


@dataclass
class Instance:
    nodes: list
    edges: list
    controllers: list  # (id, site, (cpu, mem, bw), active)
    switches: list  # (id, site)
    demands: dict
    background: dict
    assignment: dict
    source: str

    def fleet(self):
        return make_fleet(self.nodes, self.edges, self.controllers, self.switches, self.demands,
                          background=self.background, assignment=self.assignment)


def level(load):
    for i, b in enumerate(BOUNDS):
        if load < b:
            return i + 1
    return 4


def _share_units(d, cap, w=(1 / 3, 1 / 3, 1 / 3)):
    eps = w[0] * min(d[0] / cap[0], 1.0) + w[1] * min(d[1] / cap[1], 1.0) + w[2] * min(d[2] / cap[2], 1.0)
    return int(round(min(eps, 1.0) * 100.0 * SCALE))


def _load(units):
    return min(max(Fraction(units, SCALE), Fraction(0)), Fraction(100))


def _dc(a, b, mean):
    return Fraction(0) if mean <= 0 else (abs(a - mean) + abs(b - mean)) / (2 * mean)


def _num(cid):
    return int(cid[1:])


class _State:
    def __init__(self, inst: Instance):
        g = nx.Graph()
        g.add_nodes_from(inst.nodes)
        g.add_edges_from(inst.edges)
        self.dist = dict(nx.all_pairs_shortest_path_length(g))
        self.inst = inst
        self.caps = {c[0]: c[2] for c in inst.controllers}
        self.site = {c[0]: c[1] for c in inst.controllers}
        self.sw_site = dict(inst.switches)
        self.active = sorted((c[0] for c in inst.controllers if c[3]), key=_num)
        self.units = {}
        for cid in self.active:
            u = int(round(inst.background.get(cid, 0.0) * SCALE))
            u += sum(self.share(s, cid) for s, o in inst.assignment.items() if o == cid)
            self.units[cid] = u
        self.loads = {cid: _load(u) for cid, u in self.units.items()}

    def share(self, sw, cid):
        return _share_units(self.inst.demands.get(sw, (0.0, 0.0, 0.0)), self.caps[cid])

    def hops(self, sw, cid):
        return self.dist[self.sw_site[sw]][self.site[cid]]


def plan_oracle(inst: Instance, two_stage=True):
    """(switch, target, dc_before, dc_after, cost, theta) or None.

    ``two_stage`` keeps each switch's minimum-DC target before ranking by
    theta; without it every feasible improving pair competes directly.
    """
    st = _State(inst)
    src = inst.source
    if src not in st.active or level(st.loads[src]) not in (1, 3, 4):
        return None
    domain = sorted((s for s, o in inst.assignment.items() if o == src), key=lambda s: int(s[1:]))
    if not domain:
        return None
    psi = {s: Fraction(st.share(s, src), SCALE) / max(st.hops(s, src), 1) for s in domain}
    mean_psi = sum(psi.values(), Fraction(0)) / len(psi)
    cands = [s for s in domain if psi[s] >= mean_psi and st.share(s, src) > 0]
    targets = [c for c in st.active if c != src and level(st.loads[c]) in (1, 2)]
    fleet_mean = sum(st.loads.values(), Fraction(0)) / len(st.loads)

    pairs = []
    for sw in cands:
        options = []
        for t in targets:
            lr_j = _load(st.units[src] - st.share(sw, src))
            lr_k = _load(st.units[t] + st.share(sw, t))
            if level(lr_k) not in (1, 2):
                continue
            after = dict(st.loads)
            after[src], after[t] = lr_j, lr_k
            mean_after = sum(after.values(), Fraction(0)) / len(after)
            options.append((_dc(lr_j, lr_k, mean_after), _num(t), t))
        if two_stage and options:
            options = [min(options)]
        for dc_after, _, t in options:
            dc_before = _dc(st.loads[src], st.loads[t], fleet_mean)
            if not dc_after < dc_before:
                continue
            cost = Fraction(st.share(sw, t), SCALE) * max(st.hops(sw, t), 1)
            theta = abs(dc_after - dc_before) / cost
            pairs.append((-theta, cost, int(sw[1:]), sw, t, dc_before, dc_after))
    if not pairs:
        return None
    _, cost, _, sw, t, before, after = min(pairs)
    return sw, t, before, after, cost, abs(after - before) / cost


def shutdown_oracle(inst: Instance) -> bool:
    """Whether some placement of the idle source's domain keeps every target Idle/Normal."""
    st = _State(inst)
    src = inst.source
    domain = [s for s, o in inst.assignment.items() if o == src]
    targets = [c for c in st.active if c != src and level(st.loads[c]) in (1, 2)]
    if not domain:
        return True
    for placement in itertools.product(targets, repeat=len(domain)):
        units = dict(st.units)
        for sw, t in zip(domain, placement):
            units[t] += st.share(sw, t)
        if all(level(_load(units[t])) in (1, 2) for t in targets):
            return True
    return False


def random_graph(rng, n):
    nodes = [f"n{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        edges.add((nodes[rng.randrange(i)], nodes[i]))
    for _ in range(rng.randint(0, n)):
        u, v = rng.sample(nodes, 2)
        if (u, v) not in edges and (v, u) not in edges:
            edges.add((u, v))
    return nodes, sorted(edges)


def random_instance(seed, max_controllers=4, max_switches=8) -> Instance:
    rng = random.Random(seed)
    k = rng.randint(2, max_controllers)
    m = rng.randint(1, max_switches)
    nodes, edges = random_graph(rng, rng.randint(max(k, 3), 10))
    sites = rng.sample(nodes, k)
    controllers = []
    for j in range(k):
        capv = tuple(round(rng.uniform(40, 200), 3) for _ in range(3))
        active = j < 2 or rng.random() > 0.2
        controllers.append((f"c{j + 1}", sites[j], capv, active))
    active = [c[0] for c in controllers if c[3]]
    switches = [(f"s{i + 1}", rng.choice(nodes)) for i in range(m)]
    demands = {}
    for s, _ in switches:
        if rng.random() < 0.08:
            demands[s] = (0.0, 0.0, 0.0)
        else:
            demands[s] = tuple(round(rng.uniform(0, 30), 4) for _ in range(3))
    background = {c: round(rng.uniform(0, 70), 3) for c in active}
    assignment = {s: rng.choice(active) for s, _ in switches}
    inst = Instance(nodes, edges, controllers, switches, demands, background, assignment, active[0])
    st = _State(inst)
    sources = [c for c in active if level(st.loads[c]) in (1, 3, 4)]
    inst.source = rng.choice(sources) if sources else rng.choice(active)
    return inst


def random_idle_instance(seed) -> Instance:
    rng = random.Random(seed)
    k = rng.randint(2, 4)
    m = rng.randint(0, 6)
    nodes, edges = random_graph(rng, rng.randint(max(k, 3), 9))
    sites = rng.sample(nodes, k)
    controllers = [(f"c{j + 1}", sites[j], tuple(round(rng.uniform(60, 160), 3) for _ in range(3)), True)
                   for j in range(k)]
    switches = [(f"s{i + 1}", rng.choice(nodes)) for i in range(m)]
    demands = {s: tuple(round(rng.uniform(0, 5), 4) for _ in range(3)) for s, _ in switches}
    background = {"c1": 0.0}
    for j in range(2, k + 1):
        background[f"c{j}"] = round(rng.uniform(5, 52), 3)
    assignment = {s: "c1" for s, _ in switches}
    return Instance(nodes, edges, controllers, switches, demands, background, assignment, "c1")
