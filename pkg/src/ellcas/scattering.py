"""Scattering amplitudes: T-matrix elements for an elliptic cylinder
(Dirichlet/Neumann) and for the plane.

The cylinder's T is diagonal in the (parity, m) basis: a ratio of the
regular to the outgoing modified radial functions (or their derivatives) at
the surface coordinate mu0.  The strip limit mu0 = 0 gives exact symbolic
zeros for (Dirichlet, odd) and (Neumann, even) because Io and Ie' vanish
identically there; those rows are dropped from determinants entirely.

For the energy assembly the module also provides the diagonal in log form:
ratios of exponentially large/small radial functions are formed by log
subtraction, so surface coordinates that overflow a linear T are still fine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import mathieu
from .errors import InputError, NumericalError, RangeError
from .mathieu import BasisIndex, Parity, RadialKind

__all__ = ["BoundaryCondition", "EllipticSurface", "t_elliptic", "t_plane"]


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class EllipticSurface:
    """Elliptic cylinder cross-section: interfocal half-width d and radial
    surface coordinate mu0 (mu0 = 0 is a strip of width 2d)."""

    d: float
    mu0: float

    def __post_init__(self) -> None:
        if not (self.d > 0.0 and math.isfinite(self.d)):
            raise InputError(f"interfocal half-width d must be positive, got {self.d}")
        if not (self.mu0 >= 0.0 and math.isfinite(self.mu0)):
            raise InputError(f"surface coordinate mu0 must be >= 0, got {self.mu0}")

    @property
    def semi_major(self) -> float:
        return self.d * math.cosh(self.mu0)

    @property
    def semi_minor(self) -> float:
        return self.d * math.sinh(self.mu0)

    @property
    def eccentricity(self) -> float:
        return 1.0 / math.cosh(self.mu0)

    @classmethod
    def from_semi_axes(cls, a: float, b: float) -> "EllipticSurface":
        """Surface with semi-major axis a and semi-minor axis b < a."""
        if not (a > b >= 0.0):
            raise InputError(f"need semi-axes a > b >= 0, got a={a}, b={b}")
        return cls(d=math.sqrt(a * a - b * b), mu0=math.atanh(b / a))


def _is_strip_zero(bc: BoundaryCondition, index: BasisIndex) -> bool:
    return ((bc is BoundaryCondition.DIRICHLET and index.parity is Parity.ODD)
            or (bc is BoundaryCondition.NEUMANN and index.parity is Parity.EVEN))


def t_plane(bc: BoundaryCondition) -> float:
    """Specular amplitude of the perfectly conducting plane: -1 / +1."""
    if not isinstance(bc, BoundaryCondition):
        raise InputError(f"bc must be a BoundaryCondition, got {bc!r}")
    return -1.0 if bc is BoundaryCondition.DIRICHLET else 1.0


def _log_t_signed(bc: BoundaryCondition, index: BasisIndex, s: float,
                  mu0: float, kh, sg, lg, tables) -> tuple[float, float]:
    """(sign, log|T|) of the elliptic T-element from shared radial tables."""
    vi = mathieu._radial_core(RadialKind.FIRST_KIND_MODIFIED, index, s, mu0,
                              kh, sg, lg, tables)
    vk = mathieu._radial_core(RadialKind.OUTGOING_MODIFIED, index, s, mu0,
                              kh, sg, lg, tables)
    if bc is BoundaryCondition.DIRICHLET:
        (ns, nl), (ds, dl) = (vi[0], vi[1]), (vk[0], vk[1])
    else:
        (ns, nl), (ds, dl) = (vi[2], vi[3]), (vk[2], vk[3])
    if ds == 0.0 or dl == -math.inf:
        raise NumericalError(
            f"outgoing radial function vanished at mu0={mu0:g}, s={s:g} "
            f"(parity={index.parity.value}, m={index.m})")
    return -ns * ds, nl - dl


def t_elliptic(bc: BoundaryCondition, index: BasisIndex,
               surface: EllipticSurface, s: float) -> float:
    """Diagonal T-matrix element of the elliptic cylinder.

    Dirichlet: -Ie/Ke (even) or -Io/Ko (odd); Neumann: the same ratios of
    mu-derivatives.  At mu0 = 0 the (Dirichlet, odd) and (Neumann, even)
    elements are exactly zero and returned without radial evaluation.
    """
    if not isinstance(bc, BoundaryCondition):
        raise InputError(f"bc must be a BoundaryCondition, got {bc!r}")
    if not isinstance(surface, EllipticSurface):
        raise InputError(f"surface must be an EllipticSurface, got {surface!r}")
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise InputError(f"parameter s must be positive and finite, got {s}")
    if surface.mu0 == 0.0 and _is_strip_zero(bc, index):
        return 0.0
    kh, sg, lg = mathieu._negq_table(index, s, 0.0)
    sign, logmag = _log_t_signed(bc, index, s, surface.mu0, kh, sg, lg, None)
    if logmag > 709.0:
        raise RangeError(
            f"T-element overflows double range at mu0={surface.mu0:g}, "
            f"s={s:g} (parity={index.parity.value}, m={index.m})")
    return sign * math.exp(logmag)


def scatter_log_diag_both(surface: EllipticSurface, s: float,
                          indices: list[BasisIndex]
                          ) -> tuple[np.ndarray, np.ndarray]:
    """log sqrt(T_elliptic * T_plane) per basis index for the Dirichlet and
    Neumann channels, -inf marking symbolic strip zeros.

    The product T*T^P is positive for both boundary conditions (the plane's
    sign cancels the cylinder ratio's), so its square root is the natural
    symmetrizer for the round-trip determinant.  Computed entirely in log
    space; one set of Bessel ladders and one radial-series pass per order
    serve both channels (value -> Dirichlet, derivative -> Neumann).
    """
    strip = surface.mu0 == 0.0
    tabs = []
    top = 2
    for idx in indices:
        kh, sg, lg = mathieu._negq_table(idx, s, 0.0)
        tabs.append((kh, sg, lg))
        top = max(top, mathieu._table_span(kh, lg, idx.m) + (idx.m + 1) // 2)
    tables = mathieu._RadialTables(s, surface.mu0, top)
    out_d = np.full(len(indices), -math.inf)
    out_n = np.full(len(indices), -math.inf)
    for i, idx in enumerate(indices):
        kh, sg, lg = tabs[i]
        vi = mathieu._radial_core(RadialKind.FIRST_KIND_MODIFIED, idx, s,
                                  surface.mu0, kh, sg, lg, tables)
        vk = mathieu._radial_core(RadialKind.OUTGOING_MODIFIED, idx, s,
                                  surface.mu0, kh, sg, lg, tables)
        for bc, nm, dn, out in (
                (BoundaryCondition.DIRICHLET, (vi[0], vi[1]), (vk[0], vk[1]), out_d),
                (BoundaryCondition.NEUMANN, (vi[2], vi[3]), (vk[2], vk[3]), out_n)):
            if strip and _is_strip_zero(bc, idx):
                continue
            # T*T^P = -(nm/dn)*t_plane must be positive
            if nm[0] * dn[0] * t_plane(bc) >= 0.0 or dn[1] == -math.inf:
                raise NumericalError(
                    f"round-trip product T*T^P came out non-positive at "
                    f"s={s:g}, mu0={surface.mu0:g} "
                    f"(parity={idx.parity.value}, m={idx.m}, bc={bc.value})")
            out[i] = 0.5 * (nm[1] - dn[1])
    return out_d, out_n


def scatter_log_diag(bc: BoundaryCondition, surface: EllipticSurface,
                     s: float, indices: list[BasisIndex]) -> np.ndarray:
    """Single-channel variant of :func:`scatter_log_diag_both`."""
    both = scatter_log_diag_both(surface, s, indices)
    return both[0] if bc is BoundaryCondition.DIRICHLET else both[1]
