import os
import subprocess
import sys

import numpy as np
import pytest

from dlbmt import kernels

BACKENDS = kernels.backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def _inputs(seed, n=257):
    rng = np.random.default_rng(seed)
    demands = rng.uniform(0, 400, size=(n, 3))
    demands[::17] = 0.0
    demands[5] = [5000, 1, 1]  # clamped ratio
    caps = rng.uniform(50, 4000, size=(n, 3))
    return demands, caps


@needs_ext
def test_share_kernels_bit_identical():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    w = np.array([0.2, 0.5, 0.3])
    for seed in range(5):
        demands, caps = _inputs(seed)
        a = np.empty(len(demands), dtype=np.int64)
        b = np.empty(len(demands), dtype=np.int64)
        py.owner_share_units(demands, caps, w, a)
        cy.owner_share_units(demands, caps, w, b)
        assert np.array_equal(a, b)
        for i in range(0, len(demands), 7):
            args = (*map(float, demands[i]), *map(float, caps[i]), *map(float, w))
            assert py.share_units(*args) == cy.share_units(*args) == a[i]


@needs_ext
def test_demand_kernels_bit_identical():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    rates = np.random.default_rng(1).uniform(0, 300, size=300)
    costs = np.array([1.0, 0.8, 1.2])
    for seed, tick, jitter in [(0, 0, 0.1), (42, 7, 0.3), (2 ** 63 + 5, 999, 0.0), (3, 2 ** 40, 0.9)]:
        a = np.empty((300, 3))
        b = np.empty((300, 3))
        py.fill_demands(seed, tick, rates, 1.7, costs, jitter, a)
        cy.fill_demands(seed, tick, rates, 1.7, costs, jitter, b)
        assert a.tobytes() == b.tobytes()
        assert py.uniform01(seed, 11, tick) == cy.uniform01(seed, 11, tick)
        assert py.mix64(seed) == cy.mix64(seed)


@needs_ext
def test_sum_by_owner_identical():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    rng = np.random.default_rng(2)
    units = rng.integers(0, 2 ** 38, size=500, dtype=np.int64)
    owner = rng.integers(0, 6, size=500, dtype=np.int64)
    a = np.zeros(6, dtype=np.int64)
    b = np.zeros(6, dtype=np.int64)
    py.sum_by_owner(units, owner, 6, a)
    cy.sum_by_owner(units, owner, 6, b)
    assert np.array_equal(a, b)
    assert a.sum() == units.sum()


def test_uniform_range():
    xs = [kernels.uniform01(9, i, t) for i in range(50) for t in range(50)]
    assert 0.0 <= min(xs) and max(xs) < 1.0
    assert abs(sum(xs) / len(xs) - 0.5) < 0.02


def _series(env_extra):
    code = ("import dlbmt, sys; from dlbmt.report import series_csv; "
            "sys.stdout.write(dlbmt.BACKEND + '\\n' + series_csv(dlbmt.run(dlbmt.load_scenario('atlanta', ticks=200))))")
    env = dict(os.environ, **env_extra)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, _, body = out.stdout.partition("\n")
    return backend, body


def test_pure_python_fallback_selected_and_equivalent():
    backend, body = _series({"DLBMT_PURE_PYTHON": "1"})
    assert backend == "python"
    if "cython" in BACKENDS:
        native_backend, native = _series({"DLBMT_PURE_PYTHON": "0"})
        assert native_backend == "cython"
        assert native == body
