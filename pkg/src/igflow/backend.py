"""Execution backend for the hot integration kernels.

The inner Runge-Kutta loops in :mod:`igflow.kernels` are written once in
nopython-compatible NumPy and compiled with numba when available.  The
``IGFLOW_BACKEND`` environment variable (read at import time) selects the
path:

* ``auto`` (default) -- compile with numba if it imports, else run the same
  functions as plain Python/NumPy;
* ``numba``          -- require numba, fail loudly if it is missing;
* ``numpy``          -- force the uncompiled pure-NumPy path.

Both paths execute identical source, so results differ at most by
floating-point reassociation in compiled code.
"""

from __future__ import annotations

import os

from .errors import ConfigError

_choice = os.environ.get("IGFLOW_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ConfigError(
        f"IGFLOW_BACKEND={_choice!r}: expected 'auto', 'numba' or 'numpy'"
    )

if _choice == "numpy":
    NUMBA_ENABLED = False
elif _choice == "numba":
    import numba  # noqa: F401  -- import error is the intended failure mode

    NUMBA_ENABLED = True
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def njit(func=None, **options):
    """``numba.njit`` when the backend is enabled, identity otherwise."""
    if not NUMBA_ENABLED:
        if func is None:
            return lambda f: f
        return func
    from numba import njit as _njit

    if func is None:
        return _njit(**options)
    return _njit(func)
