"""Metric series serialization and run/compare summaries."""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter

from .simulator import MetricsRecord, Simulation
from .topology import id_key

SERIES_FIELDS = ("mean_rt_ms", "imbalance", "balancing_rate", "cum_cost", "cum_msgs",
                 "migrations", "active_controllers")
# metric -> True when larger is better
COMPARED = {
    "mean_rt_ms": False,
    "imbalance": False,
    "balancing_rate": True,
    "total_cost": False,
    "total_messages": False,
    "migrations": False,
}


def controller_ids(records: list[MetricsRecord]) -> list[str]:
    ids = set()
    for r in records:
        ids.update(r.loads)
    return sorted(ids, key=id_key)


def series_csv(records: list[MetricsRecord]) -> str:
    ids = controller_ids(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tick"] + [f"load_{c}" for c in ids] + list(SERIES_FIELDS))
    for r in records:
        loads = [("" if r.loads.get(c) is None else repr(r.loads[c])) for c in ids]
        w.writerow([r.tick] + loads + [
            repr(r.mean_rt_ms), repr(r.imbalance), repr(r.balancing_rate), repr(r.cum_cost),
            r.cum_msgs, r.migrations, r.active_controllers,
        ])
    return buf.getvalue()


def series_json(records: list[MetricsRecord]) -> str:
    rows = []
    for r in records:
        row = {"tick": r.tick, "loads": r.loads,
               "levels": {k: (None if v is None else v.name) for k, v in r.levels.items()}}
        row.update({f: getattr(r, f) for f in SERIES_FIELDS})
        rows.append(row)
    return json.dumps(rows)


def summarize(sim: Simulation) -> dict:
    records = sim.records
    n = len(records)
    actions = Counter(a[0] for r in records for a in r.scale_actions)
    last = records[-1]
    return {
        "strategy": sim.config.strategy,
        "seed": sim.config.seed,
        "ticks": n,
        "means": {
            "mean_rt_ms": math.fsum(r.mean_rt_ms for r in records) / n,
            "imbalance": math.fsum(r.imbalance for r in records) / n,
            "balancing_rate": math.fsum(r.balancing_rate for r in records) / n,
            "active_controllers": sum(r.active_controllers for r in records) / n,
        },
        "totals": {
            "migrations": last.cum_migrations,
            "total_cost": last.cum_cost,
            "total_messages": last.cum_msgs,
            "notifications": sum(r.notifications for r in records),
            "scale_actions": dict(sorted(actions.items())),
        },
        "final": {
            "active_controllers": last.active_controllers,
            "controllers": {
                c.id: {"active": c.active, "site": c.site, "load": c.load if c.active else 0.0,
                       "level": c.level.name if c.active else None, "domain_size": len(c.domain)}
                for c in sim.fleet.controllers.values()
            },
        },
    }


def metric_values(summary: dict) -> dict:
    m, t = summary["means"], summary["totals"]
    return {
        "mean_rt_ms": m["mean_rt_ms"],
        "imbalance": m["imbalance"],
        "balancing_rate": m["balancing_rate"],
        "total_cost": t["total_cost"],
        "total_messages": t["total_messages"],
        "migrations": t["migrations"],
    }


def improvement(candidate: float, reference: float, higher_is_better: bool):
    """Percent by which ``candidate`` beats ``reference`` (negative if worse)."""
    if reference == 0:
        return 0.0 if candidate == 0 else None
    delta = candidate - reference if higher_is_better else reference - candidate
    return 100.0 * delta / abs(reference)


def comparison(per_strategy: dict[str, list[dict]]) -> dict:
    """Per-strategy means over seeds, and the first strategy's improvement over each other."""
    means = {}
    for label, summaries in per_strategy.items():
        vals = [metric_values(s) for s in summaries]
        means[label] = {k: math.fsum(v[k] for v in vals) / len(vals) for k in COMPARED}
    labels = list(per_strategy)
    head = labels[0]
    improvements = {
        other: {k: improvement(means[head][k], means[other][k], hib) for k, hib in COMPARED.items()}
        for other in labels[1:]
    }
    return {"reference": head, "means": means, "improvement_pct": improvements}


def comparison_table(comp: dict) -> str:
    cols = list(COMPARED)
    lines = [f"{'strategy':<22}" + "".join(f"{c:>16}" for c in cols)]
    for label, vals in comp["means"].items():
        lines.append(f"{label:<22}" + "".join(f"{vals[c]:>16.4f}" for c in cols))
    for other, imp in comp["improvement_pct"].items():
        name = f"{comp['reference']} vs {other} %"
        cells = "".join(f"{'n/a':>16}" if imp[c] is None else f"{imp[c]:>16.2f}" for c in cols)
        lines.append(f"{name:<22}" + cells)
    return "\n".join(lines)


def comparison_csv(comp: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(COMPARED)
    w.writerow(["row"] + cols)
    for label, vals in comp["means"].items():
        w.writerow([label] + [repr(vals[c]) for c in cols])
    for other, imp in comp["improvement_pct"].items():
        w.writerow([f"improvement_vs_{other}"] + ["" if imp[c] is None else repr(imp[c]) for c in cols])
    return buf.getvalue()
