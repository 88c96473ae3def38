"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--switches 110 1000 10000] [--ticks 1000]

Prints per-call kernel timings for each backend, then the wall time of a
full germany50 run under each backend (separate interpreters, selected via
DLBMT_PURE_PYTHON).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dlbmt import kernels


def bench_backend(mod, n, repeat=200):
    rng = np.random.default_rng(0)
    rates = rng.uniform(0, 300, n)
    costs = np.array([1.0, 0.8, 1.2])
    demands = np.empty((n, 3))
    caps = np.full((n, 3), 3000.0)
    w = np.array([1 / 3, 1 / 3, 1 / 3])
    units = np.empty(n, dtype=np.int64)
    owner = rng.integers(0, 7, n).astype(np.int64)
    totals = np.zeros(7, dtype=np.int64)
    calls = {
        "fill_demands": lambda: mod.fill_demands(11, 5, rates, 1.3, costs, 0.1, demands),
        "owner_share_units": lambda: mod.owner_share_units(demands, caps, w, units),
        "sum_by_owner": lambda: mod.sum_by_owner(units, owner, 7, totals),
        "share_units x100": lambda: [mod.share_units(1.0, 2.0, 3.0, 10.0, 10.0, 10.0, 0.3, 0.3, 0.4)
                                     for _ in range(100)],
    }
    calls["fill_demands"]()
    return {name: min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat * 1e6 for name, fn in calls.items()}


RUN_CODE = """
import time, dlbmt
cfg = dlbmt.load_scenario('germany50', ticks={ticks})
t0 = time.perf_counter(); dlbmt.run(cfg); print(dlbmt.BACKEND, time.perf_counter() - t0)
"""


def bench_run(pure: bool, ticks: int):
    env = dict(os.environ, DLBMT_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", RUN_CODE.format(ticks=ticks)], env=env,
                         capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--switches", type=int, nargs="+", default=[110, 1000, 10000])
    ap.add_argument("--ticks", type=int, default=1000)
    args = ap.parse_args()

    found = kernels.backends()
    print(f"backends available: {', '.join(found)}")
    for n in args.switches:
        results = {name: bench_backend(mod, n) for name, mod in found.items()}
        print(f"\n{n} switches, microseconds per call")
        print(f"{'kernel':<20}" + "".join(f"{name:>12}" for name in results))
        for kernel in next(iter(results.values())):
            print(f"{kernel:<20}" + "".join(f"{results[name][kernel]:>12.2f}" for name in results))

    print(f"\ngermany50, {args.ticks} ticks, full simulation")
    for pure in (True, False):
        backend, seconds = bench_run(pure, args.ticks)
        print(f"  {backend:<8} {seconds:.3f} s")


if __name__ == "__main__":
    main()
