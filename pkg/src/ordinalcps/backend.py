"""Kernel backend selection.

The compiled extension (``ordinalcps._scan``) is preferred when importable;
otherwise the pure-Python kernels take over with identical semantics. Set
``ORDINALCPS_BACKEND=pure`` to force the fallback (useful for benchmarking
and for debugging the reference implementation), or ``=compiled`` to make a
missing extension a hard error.
"""

from __future__ import annotations

import os

from . import _scan_py

try:
    from . import _scan as _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("ORDINALCPS_BACKEND", "").strip().lower()
if _requested == "compiled" and _compiled is None:
    raise ImportError(
        "ORDINALCPS_BACKEND=compiled but the ordinalcps._scan extension is "
        "not built; install with `pip install -e . --no-build-isolation`"
    )
_use_compiled = _compiled is not None and _requested != "pure"

_active = _compiled if _use_compiled else _scan_py

scan_min_interval = _active.scan_min_interval
batch_min_intervals = _active.batch_min_intervals
coverage_count = _active.coverage_count

# Instrumentation stays on the reference implementation; it exists to check
# the pointer-advance bound, not to be fast.
scan_min_interval_instrumented = _scan_py.scan_min_interval_instrumented

TIE_TOL = _scan_py.TIE_TOL


def backend_name() -> str:
    return "compiled" if _use_compiled else "pure"


def compiled_available() -> bool:
    return _compiled is not None


def get_kernels(name: str):
    """Return the kernel module for an explicit backend name."""
    if name == "pure":
        return _scan_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled backend not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
