"""``dlbmt`` command line: run, compare, validate, import-graphml.

Exit status 1 means a configuration problem, 2 a failure during simulation.
Results go to stdout or files; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import report
from .errors import ConfigError, DLBMTError
from .scenario import config_from_dict, load_document
from .simulator import STRATEGIES, Simulation
from .topology import import_graphml

EXIT_CONFIG = 1
EXIT_RUNTIME = 2

STRATEGY_ALIASES = {"dlbmt": "dlbmt", "single-threshold": "single-threshold",
                    "single": "single-threshold", "single_threshold": "single-threshold"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _strategy(name: str) -> str:
    try:
        return STRATEGY_ALIASES[name.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")


def _seed_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dlbmt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--scenario", required=True, help="scenario file or bundled name (atlanta, arn, germany50, interroute)")
        sp.add_argument("--strategy", action="append", type=_strategy, default=None,
                        help="dlbmt or single-threshold; repeatable")
        sp.add_argument("--seed", action="append", type=int, default=None, help="repeatable")
        sp.add_argument("--seeds", type=_seed_list, default=None, help="comma-separated seed list")
        sp.add_argument("--ticks", type=int, default=None)
        sp.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="dot-path override applied after parsing, e.g. workload.jitter=0.2")
        sp.add_argument("--workers", type=int, default=None, help="threads for independent runs")

    run = sub.add_parser("run", help="simulate and write per-tick metrics")
    common(run)
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    cmp_ = sub.add_parser("compare", help="paired runs of two or more strategies")
    common(cmp_)
    cmp_.add_argument("--strategies", type=lambda s: [_strategy(x) for x in s.split(",") if x], default=None)
    cmp_.add_argument("--out", default=None, help="also write comparison.json here")
    cmp_.add_argument("--format", choices=("table", "csv", "json"), default="table")

    val = sub.add_parser("validate", help="parse and validate a scenario without simulating")
    val.add_argument("--scenario", required=True)
    val.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")

    imp = sub.add_parser("import-graphml", help="convert GraphML nodes/edges to the scenario grammar")
    imp.add_argument("path")
    imp.add_argument("--out", default=None)
    return p


def _seeds(args, default: int) -> list[int]:
    seeds = list(args.seed or []) + list(args.seeds or [])
    return seeds or [default]


def _execute(doc, path, strategy, seed, ticks):
    d = dict(doc)
    d["strategy"] = strategy
    d["seed"] = seed
    if ticks is not None:
        d["ticks"] = ticks
    sim = Simulation(config_from_dict(d, name=path.stem))
    sim.run()
    return sim


def _effective_config(doc: dict) -> dict:
    cfg = {k: v for k, v in doc.items() if k not in ("nodes", "edges", "controllers", "switches")}
    if isinstance(cfg.get("workload"), dict):
        cfg["workload"] = {k: v for k, v in cfg["workload"].items() if k != "rates"}
    return cfg


def _run_all(doc, path, strategies, seeds, ticks, workers):
    # validate once up front so config errors surface before any run starts
    config_from_dict(dict(doc, strategy=strategies[0]), name=path.stem)
    jobs = [(s, seed) for s in strategies for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        sims = list(pool.map(lambda j: _execute(doc, path, j[0], j[1], ticks), jobs))
    return list(zip(jobs, sims))


def cmd_run(args) -> int:
    doc, path = load_document(args.scenario, args.overrides)
    strategies = args.strategy or [doc.get("strategy", "dlbmt")]
    seeds = _seeds(args, int(doc.get("seed", 0)))
    results = _run_all(doc, path, strategies, seeds, args.ticks, args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"scenario": doc.get("name", path.stem), "scenario_path": str(path),
               "config": _effective_config(doc), "runs": {}}
    for (strategy, seed), sim in results:
        stem = f"{strategy}-{seed}"
        if args.format == "csv":
            (out / f"{stem}.csv").write_text(report.series_csv(sim.records))
        else:
            (out / f"{stem}.json").write_text(report.series_json(sim.records))
        summary["runs"][stem] = report.summarize(sim)
        m = summary["runs"][stem]["means"]
        t = summary["runs"][stem]["totals"]
        print(f"{stem}: rt={m['mean_rt_ms']:.3f}ms imbalance={m['imbalance']:.4f} "
              f"rate={m['balancing_rate']:.3f} migrations={t['migrations']} cost={t['total_cost']:.2f} "
              f"msgs={t['total_messages']}")
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"wrote {len(results)} series and summary.json to {out}")
    return 0


def cmd_compare(args) -> int:
    strategies = list(args.strategy or []) + list(args.strategies or [])
    if len(strategies) < 2:
        print("usage: dlbmt compare --scenario S --strategy A --strategy B [--seeds 0,1,2]", file=sys.stderr)
        print("dlbmt compare: error: need at least two strategies", file=sys.stderr)
        return EXIT_CONFIG
    doc, path = load_document(args.scenario, args.overrides)
    seeds = _seeds(args, int(doc.get("seed", 0)))
    labels = []
    for s in strategies:
        label, k = s, 2
        while label in labels:
            label = f"{s}#{k}"
            k += 1
        labels.append(label)
    results = _run_all(doc, path, strategies, seeds, args.ticks, args.workers)
    per = {label: [] for label in labels}
    for i, ((_, _seed), sim) in enumerate(results):
        per[labels[i // len(seeds)]].append(report.summarize(sim))
    comp = report.comparison(per)
    comp.update(scenario=doc.get("name", path.stem), seeds=seeds)
    if args.format == "json":
        print(json.dumps(comp, indent=2))
    elif args.format == "csv":
        sys.stdout.write(report.comparison_csv(comp))
    else:
        print(f"scenario {comp['scenario']}, seeds {seeds}")
        print(report.comparison_table(comp))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.json").write_text(json.dumps(comp, indent=2) + "\n")
    return 0


def cmd_validate(args) -> int:
    doc, path = load_document(args.scenario, args.overrides)
    cfg = config_from_dict(doc, name=path.stem)
    topo = cfg.topology
    caps = {c.capacity_cpu for c in topo.controllers} | {c.capacity_mem for c in topo.controllers} \
        | {c.capacity_bw for c in topo.controllers}
    cap = f"cap {next(iter(caps)):g}" if len(caps) == 1 else "mixed capacities"
    print(f"{len(topo.graph.nodes)} nodes, {len(topo.graph.edges)} edges, "
          f"{len(topo.controllers)} controllers ({cap}), {len(topo.switches)} switches")
    print(f"{'controller':<12}{'site':<16}{'cpu':>10}{'mem':>10}{'bw':>10}  active")
    for c in topo.controllers:
        print(f"{c.id:<12}{c.site:<16}{c.capacity_cpu:>10g}{c.capacity_mem:>10g}{c.capacity_bw:>10g}  "
              f"{'yes' if c.initially_active else 'no'}")
    return 0


def cmd_import_graphml(args) -> int:
    text = json.dumps(import_graphml(args.path), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "validate": cmd_validate,
            "import-graphml": cmd_import_graphml}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dlbmt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DLBMTError as exc:
        print(f"dlbmt: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
