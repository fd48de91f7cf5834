"""Casimir interaction of a conducting elliptic cylinder (or zero-thickness
strip) with a conducting plane, from the exact scattering round-trip
determinant in elliptic-cylinder coordinates.

The public layers:

- :mod:`ellcas.mathieu` — angular/radial Mathieu functions on the imaginary
  frequency axis (characteristic values, Fourier coefficient tables,
  negative-parameter variants, modified radial functions).
- :mod:`ellcas.scattering` — diagonal T-matrix elements of the ellipse and
  the plane for Dirichlet and Neumann boundary conditions.
- :mod:`ellcas.translation` — the plane-to-ellipse round-trip kernel as
  exponentially weighted u-integrals.
- :mod:`ellcas.energy` — momentum integration, truncation ladders, and
  exponential extrapolation; `em_energy` is the headline entry point.
- :mod:`ellcas.reference` — independent cross-checks (proximity-force
  formula, circular-cylinder oracle, Green's-function and plane-wave
  identities).
- :mod:`ellcas.cli` — `ellcas` command-line front end.

Hot kernels run as numba-compiled code by default; set
``ELLCAS_BACKEND=numpy`` to force the pure-numpy twins (same contracts,
same results to the last bit is *not* guaranteed between backends, but all
validation bounds hold for both).
"""

from .backend import ACTIVE_BACKEND, get_kernels, warmup
from .energy import (DEFAULT_LADDER, EnergyResult, Geometry, casimir_energy,
                     em_energy, extrapolate, logdet_integrand, sector_indices)
from .errors import (ConvergenceError, EllcasError, InputError,
                     NumericalError, RangeError)
from .mathieu import (BasisIndex, MathieuExpansion, Parity, RadialKind,
                      angular, angular_negq, build_expansion,
                      fresh_coefficient_cache, radial_modified)
from .quadrature import QuadratureSpec, adaptive_gk, gauss_legendre
from .reference import (HALF_PLANE_SINGLE, HALF_PLANE_SUPERPOSED, PfaInput,
                        cylinder_plane_energy, greens_equivalence_residual,
                        pfa_energy, planewave_expansion_residual)
from .scattering import (BoundaryCondition, EllipticSurface, t_elliptic,
                         t_plane)
from .translation import KernelMatrix, basis_indices, kernel_matrix

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND", "get_kernels", "warmup",
    "DEFAULT_LADDER", "EnergyResult", "Geometry", "casimir_energy",
    "em_energy", "extrapolate", "logdet_integrand", "sector_indices",
    "ConvergenceError", "EllcasError", "InputError", "NumericalError",
    "RangeError",
    "BasisIndex", "MathieuExpansion", "Parity", "RadialKind", "angular",
    "angular_negq", "build_expansion", "fresh_coefficient_cache",
    "radial_modified",
    "QuadratureSpec", "adaptive_gk", "gauss_legendre",
    "HALF_PLANE_SINGLE", "HALF_PLANE_SUPERPOSED", "PfaInput",
    "cylinder_plane_energy", "greens_equivalence_residual", "pfa_energy",
    "planewave_expansion_residual",
    "BoundaryCondition", "EllipticSurface", "t_elliptic", "t_plane",
    "KernelMatrix", "basis_indices", "kernel_matrix",
    "__version__",
]
