"""Backend selection: numba-jitted kernels with a pure-numpy fallback.

The hot numerical kernels (tridiagonal eigenpairs, scaled Bessel ladders,
complex-angle evaluation tables, dense LU log-determinants) exist twice:

* ``ellcas._kernels_numba`` -- @njit loop implementations (default when
  numba imports cleanly),
* ``ellcas._kernels_numpy`` -- vectorized numpy implementations with
  identical signatures and, up to floating-point reassociation, identical
  results.

Selection is by the environment variable ``ELLCAS_BACKEND`` (``numba`` or
``numpy``); unset means numba if available.  ``ELLCAS_CACHE_DIR``, if set,
is handed to numba as its on-disk compilation cache directory and must be
exported before the first import of this package.
"""

import os

from .errors import InputError

_ENV_BACKEND = "ELLCAS_BACKEND"
_ENV_CACHE = "ELLCAS_CACHE_DIR"

if os.environ.get(_ENV_CACHE):
    os.environ.setdefault("NUMBA_CACHE_DIR", os.environ[_ENV_CACHE])

try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

_requested = os.environ.get(_ENV_BACKEND, "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise InputError(
        f"{_ENV_BACKEND} must be 'numba' or 'numpy', got {_requested!r}")
if _requested == "numba" and not HAS_NUMBA:
    raise InputError(f"{_ENV_BACKEND}=numba requested but numba is not importable")

if _requested == "numpy" or not HAS_NUMBA:
    from . import _kernels_numpy as kernels
    ACTIVE_BACKEND = "numpy"
else:
    from . import _kernels_numba as kernels
    ACTIVE_BACKEND = "numba"


def get_kernels(name=None):
    """Return a kernels module by name ('numba'/'numpy'), or the active one.

    Used by the cross-backend tests and the benchmark; normal code imports
    ``kernels`` from this module directly.
    """
    if name is None:
        return kernels
    if name == "numpy":
        from . import _kernels_numpy
        return _kernels_numpy
    if name == "numba":
        if not HAS_NUMBA:
            raise InputError("numba backend requested but numba is not importable")
        from . import _kernels_numba
        return _kernels_numba
    raise InputError(f"unknown backend {name!r}")


def warmup():
    """Trigger jit compilation of the active backend on tiny inputs.

    Calling this once up front keeps compile time out of timed or
    latency-sensitive paths; it is a no-op for the numpy backend.
    """
    import numpy as np
    d = np.array([0.0, 4.0, 16.0])
    e = np.array([1.0, 1.0])
    kernels.tridiag_eigenpair(d, e, 0)
    kernels.log_bessel_i(3, 0.7)
    kernels.log_bessel_k(3, 0.7)
    kernels.angular_tables(np.array([0.0, 2.0]), np.array([1.0, -1.0]),
                           np.array([-0.1, -3.0]), 1.2,
                           np.array([0.0, 0.5]), True)
    kernels.lu_logdet(np.array([[2.0, 0.1], [0.1, 1.5]]))
