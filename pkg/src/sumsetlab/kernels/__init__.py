"""Kernel backend selection for the grid lane.

The hot sweep kernels run under numba by default; setting
SUMSETLAB_BACKEND=numpy selects the pure-numpy fallback (also used
automatically when numba cannot be imported).  Both backends consume the
same direction tables and return bit-identical arrays.
"""
from __future__ import annotations

import os
from types import ModuleType

from .tables import GridTables, grid_tables, validate_grid, MAX_GRID_SIDE

__all__ = [
    "GridTables",
    "grid_tables",
    "validate_grid",
    "MAX_GRID_SIDE",
    "active_backend",
    "get_kernels",
    "set_backend",
]

_FORCED: str | None = None
_CACHED: ModuleType | None = None


def _resolve_name() -> str:
    if _FORCED is not None:
        return _FORCED
    env = os.environ.get("SUMSETLAB_BACKEND", "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    if env:
        raise ValueError(f"SUMSETLAB_BACKEND must be 'numba' or 'numpy', got {env!r}")
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:  # pragma: no cover - depends on environment
        return "numpy"


def set_backend(name: str | None):
    """Force a backend ('numba' / 'numpy') or reset to auto with None."""
    global _FORCED, _CACHED
    if name is not None and name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    _FORCED = name
    _CACHED = None


def get_kernels() -> ModuleType:
    global _CACHED
    if _CACHED is None:
        name = _resolve_name()
        if name == "numba":
            from . import _numba as mod
        else:
            from . import _numpy as mod
        _CACHED = mod
    return _CACHED


def active_backend() -> str:
    return get_kernels().NAME
