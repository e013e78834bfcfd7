"""Kernel backend selection.

Uses the compiled extension when it is importable, unless GNLS_PURE_PYTHON
is set to a truthy value; otherwise falls back to the pure-Python reference
backend.  Both expose the same functions with identical semantics.
"""

import os

from . import py as _py

_impl = _py
if os.environ.get("GNLS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _py

BACKEND = _impl.BACKEND

two_opt = _impl.two_opt
relocate = _impl.relocate
swap = _impl.swap
greedy_insert = _impl.greedy_insert
regret2_insert = _impl.regret2_insert


def get_backend(name: str):
    """Return a specific backend module ("python" or "cython") for benchmarks."""
    if name == "python":
        return _py
    if name == "cython":
        from . import _cy
        return _cy
    raise ValueError(f"unknown backend {name!r}")
