"""Backend selection for the hot loops.

Kernels are written once in the numba-compatible subset of Python.  With
``FTC_NUMBA=0`` in the environment (or numba missing) the decorator is the
identity and the very same functions run as plain Python.
"""

from __future__ import annotations

import os

_flag = os.environ.get("FTC_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    if not _wanted:
        raise ImportError
    from numba import njit as _numba_njit

    NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _numba_njit = None
    NUMBA = False

BACKEND = "numba" if NUMBA else "python"


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, otherwise a no-op decorator."""
    if NUMBA:
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
