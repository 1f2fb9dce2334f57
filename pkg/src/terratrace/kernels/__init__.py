"""Hot query kernels with two interchangeable backends.

The compiled Cython extension is used when it was built at install time;
otherwise the numpy implementation takes over.  ``TERRATRACE_KERNELS=python``
forces the fallback (useful for benchmarking and debugging).  Both backends
implement identical formulas so query results do not depend on the backend.
"""

from __future__ import annotations

import os

from terratrace.kernels import _pykernels

_BACKENDS = {"python": _pykernels}
try:
    from terratrace.kernels import _ckernels

    _BACKENDS["c"] = _ckernels
except ImportError:
    _ckernels = None

_requested = os.environ.get("TERRATRACE_KERNELS", "auto").lower()
if _requested == "python":
    BACKEND = "python"
elif _requested == "c" and "c" in _BACKENDS:
    BACKEND = "c"
else:
    BACKEND = "c" if "c" in _BACKENDS else "python"

_active = _BACKENDS[BACKEND]

points_in_polygon = _active.points_in_polygon
nearest_index = _active.nearest_index


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def backend_module(name: str):
    return _BACKENDS[name]
