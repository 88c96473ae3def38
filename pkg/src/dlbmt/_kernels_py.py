"""Pure-Python/numpy implementation of the per-tick kernels.

Must stay bit-identical to ``_kernels.pyx``: same operation order, IEEE
double arithmetic, round-half-even quantization.
"""
import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

# load shares live on a 2**-32 grid so that sums are exact in any order
SHARE_SCALE = 4294967296.0
INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def uniform01(seed: int, index: int, tick: int) -> float:
    """Counter-based uniform draw in [0, 1) keyed by (seed, switch index, tick)."""
    h = mix64(mix64(mix64(seed & MASK64) ^ (index & MASK64)) ^ (tick & MASK64))
    return (h >> 11) * INV_2_53


def share_units(dc, dm, db, cc, cm, cb, a, b, c) -> int:
    """Quantized weighted consumption (percent points, in 2**-32 units)."""
    r0 = dc / cc
    r1 = dm / cm
    r2 = db / cb
    if r0 > 1.0:
        r0 = 1.0
    if r1 > 1.0:
        r1 = 1.0
    if r2 > 1.0:
        r2 = 1.0
    eps = a * r0 + b * r1 + c * r2
    if eps > 1.0:
        eps = 1.0
    return int(round(eps * 100.0 * SHARE_SCALE))


def _mix64_np(z):
    z = z + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def fill_demands(seed, tick, rates, multiplier, unit_costs, jitter, out):
    n = rates.shape[0]
    if jitter != 0.0:
        head = np.uint64(mix64(seed & MASK64))
        idx = np.arange(n, dtype=np.uint64)
        with np.errstate(over="ignore"):
            h = _mix64_np(_mix64_np(head ^ idx) ^ np.uint64(tick & MASK64))
        x = (h >> np.uint64(11)).astype(np.float64) * INV_2_53
        u = jitter * (2.0 * x - 1.0)
        scale = rates * multiplier * (1.0 + u)
    else:
        scale = rates * multiplier
    out[:, 0] = scale * unit_costs[0]
    out[:, 1] = scale * unit_costs[1]
    out[:, 2] = scale * unit_costs[2]
    return out


def owner_share_units(demands, caps, weights, out):
    """Per-switch share on the controller whose capacity row is in ``caps``."""
    r = np.minimum(demands / caps, 1.0)
    eps = weights[0] * r[:, 0] + weights[1] * r[:, 1] + weights[2] * r[:, 2]
    eps = np.minimum(eps, 1.0)
    out[:] = np.rint(eps * 100.0 * SHARE_SCALE).astype(np.int64)
    return out


def sum_by_owner(units, owner, k, out):
    out[:k] = 0
    np.add.at(out, owner, units)
    return out
