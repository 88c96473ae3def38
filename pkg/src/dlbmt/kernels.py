"""Backend selection for the per-tick kernels.

The compiled extension is used when it imports; ``DLBMT_PURE_PYTHON=1``
forces the numpy fallback. Both backends produce identical bits.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("DLBMT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

SHARE_SCALE = _kernels_py.SHARE_SCALE
mix64 = _impl.mix64
uniform01 = _impl.uniform01
share_units = _impl.share_units
fill_demands = _impl.fill_demands
owner_share_units = _impl.owner_share_units
sum_by_owner = _impl.sum_by_owner


def backends():
    """Every importable backend module, keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
