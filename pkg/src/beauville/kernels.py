"""Backend selection for the permutation kernels.

The compiled extension is used when importable; ``BEAUVILLE_PURE_PYTHON=1``
forces the reference implementation.  ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("BEAUVILLE_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

compose = _impl.compose
invert = _impl.invert
cycle_counts = _impl.cycle_counts
orbit_schreier = _impl.orbit_schreier
sift = _impl.sift
anneal_product = _impl.anneal_product


def backends() -> dict:
    """Every importable backend by name (the reference one is always present)."""
    found = {"python": _pykernels}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found
