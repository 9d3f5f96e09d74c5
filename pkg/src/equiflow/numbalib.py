"""Acceleration backend selection.

The hot stepping kernels exist twice: a numba @njit version with scalar
loops (kernels_numba) and a vectorised pure-numpy version (kernels_numpy).
Set EQUIFLOW_DISABLE_NUMBA=1 to force the numpy path; it is also used
automatically when numba is not importable.
"""

import os

DISABLE_ENV = "EQUIFLOW_DISABLE_NUMBA"


def numba_disabled() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not numba_disabled()
