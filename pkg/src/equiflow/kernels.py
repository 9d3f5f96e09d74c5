"""Facade over the two kernel backends.

BACKEND is "numba" or "numpy"; selection happens once at import time
(see numbalib).  Benchmarks and equivalence tests import the backend
modules directly.
"""

from .numbalib import USE_NUMBA

if USE_NUMBA:
    from .kernels_numba import (  # noqa: F401
        ghost_derivatives, lawlor_rhs, lawlor_min_gprime2, lawlor_terms,
        clifford_rhs, clifford_terms, thomas, semi_implicit_solve,
    )
    BACKEND = "numba"
else:  # pragma: no cover - exercised via EQUIFLOW_DISABLE_NUMBA in CI helpers
    from .kernels_numpy import (  # noqa: F401
        ghost_derivatives, lawlor_rhs, lawlor_min_gprime2, lawlor_terms,
        clifford_rhs, clifford_terms, thomas, semi_implicit_solve,
    )
    BACKEND = "numpy"
