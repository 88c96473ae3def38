"""Regenerate the bundled scenario files under src/dlbmt/scenarios/.

Atlanta and Germany50 (SNDlib) and ARN (Topology Zoo) graphs are read from
the data directory of the ``topohub`` package (MIT licensed). Interroute is
not shipped there, so a synthetic graph with the same node/edge counts is
generated instead.

    python tools/build_scenarios.py --topohub-data /path/to/topohub/data
"""
import argparse
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "dlbmt" / "scenarios"

# (name, topohub data file, controller count, capacity per resource)
TABLE = [
    ("atlanta", "sndlib/atlanta.json", 3, 2000),
    ("arn", "topozoo/Arn.json", 4, 2500),
    ("germany50", "sndlib/germany50.json", 5, 3000),
    ("interroute", None, 7, 4000),
]
TICKS = 1000


def read_topohub(path):
    doc = json.loads(Path(path).read_text())
    names = {}
    nodes = []
    for n in doc["nodes"]:
        name = str(n.get("name", n["id"])).replace(" ", "_")
        base, k = name, 2
        while name in names.values():
            name = f"{base}_{k}"
            k += 1
        names[n["id"]] = name
        nodes.append(name)
    edges, seen = [], set()
    for e in doc["edges"]:
        u, v = names[e["source"]], names[e["target"]]
        key = frozenset((u, v))
        if u != v and key not in seen:
            seen.add(key)
            edges.append([u, v])
    return nodes, edges


def pad_tree(nodes, edges, n_target, e_target):
    """Attach pendant nodes to the highest-degree node until counts match."""
    deg = {n: 0 for n in nodes}
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    hub = max(nodes, key=lambda n: (deg[n], -nodes.index(n)))
    k = 1
    while len(nodes) < n_target and len(edges) < e_target:
        name = f"pendant{k}"
        nodes.append(name)
        edges.append([hub, name])
        k += 1
    return nodes, edges


def synthetic_graph(n, m, seed):
    """Euclidean MST over random points plus the shortest extra links."""
    rng = random.Random(seed)
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    names = [f"IR{i + 1:03d}" for i in range(n)]

    def d(i, j):
        return math.dist(pts[i], pts[j])

    best = {j: (d(0, j), 0) for j in range(1, n)}
    edges = set()
    while best:
        j = min(best, key=lambda x: best[x][0])
        _, i = best.pop(j)
        edges.add((min(i, j), max(i, j)))
        for k in best:
            if d(j, k) < best[k][0]:
                best[k] = (d(j, k), j)
    extra = sorted((d(i, j), i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges)
    for _, i, j in extra[: m - len(edges)]:
        edges.add((i, j))
    return names, [[names[i], names[j]] for i, j in sorted(edges)]


def bfs(adj, s):
    dist = {s: 0}
    q = [s]
    for u in q:
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def place_controllers(nodes, edges, k):
    """Farthest-first sites, starting from the most central node."""
    adj = {n: [] for n in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    tables = {n: bfs(adj, n) for n in nodes}
    first = min(nodes, key=lambda n: (sum(tables[n].values()), nodes.index(n)))
    sites = [first]
    while len(sites) < k:
        nxt = max(nodes, key=lambda n: (min(tables[s][n] for s in sites), -nodes.index(n)))
        sites.append(nxt)
    return sites


def ramp(ticks, lo=0.4, hi=2.0, steps=10):
    width = ticks // steps
    out = []
    for i in range(steps):
        mult = lo + (hi - lo) * i / (steps - 1)
        end = ticks if i == steps - 1 else (i + 1) * width
        out.append({"from_tick": i * width, "to_tick": end, "multiplier": round(mult, 4)})
    return out


def build(name, nodes, edges, k, cap, seed, source):
    sites = place_controllers(nodes, edges, k)
    rng = random.Random(seed)
    n = len(nodes)
    raw = [rng.lognormvariate(0.0, 0.5) for _ in range(n)]
    target_total = 0.5 * k * cap
    scale = target_total / sum(raw)
    switches = [{"id": f"s{i + 1}", "site": node} for i, node in enumerate(nodes)]
    rates = {f"s{i + 1}": round(r * scale, 2) for i, r in enumerate(raw)}
    return {
        "name": name,
        "description": f"{name}: {n} nodes, {len(edges)} edges, {k} controllers of capacity {cap}",
        "source": source,
        "nodes": nodes,
        "edges": edges,
        "controllers": [
            {"id": f"c{j + 1}", "site": s, "capacity": {"cpu": cap, "mem": cap, "bw": cap}, "active": True}
            for j, s in enumerate(sites)
        ],
        "switches": switches,
        "workload": {
            "rates": rates,
            "unit_costs": {"cpu": 1.0, "mem": 0.8, "bw": 1.2},
            "jitter": 0.1,
            "modulation": ramp(TICKS),
        },
        "weights": {"a": 1 / 3, "b": 1 / 3, "c": 1 / 3},
        "thresholds": [25, 50, 75, 100],
        "ticks": TICKS,
        "seed": 0,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--topohub-data", type=Path, required=True)
    args = ap.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    for idx, (name, rel, k, cap) in enumerate(TABLE):
        if rel is None:
            nodes, edges = synthetic_graph(110, 159, seed=110159)
            source = "synthetic graph matching Interroute's node/edge counts (Euclidean MST + shortest extra links)"
        else:
            nodes, edges = read_topohub(args.topohub_data / rel)
            source = f"topohub data/{rel}"
            if name == "arn":
                nodes, edges = pad_tree(nodes, edges, 30, 29)
                source += " plus two pendant nodes to match 30 nodes / 29 edges"
        doc = build(name, nodes, edges, k, cap, seed=1000 + idx, source=source)
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(name, len(nodes), len(edges))


if __name__ == "__main__":
    main()
