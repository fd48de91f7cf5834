"""Translation kernel: the real symmetric matrix of u-integrals that couples
the cylinder's elliptic modes through reflection off the plane, at fixed
transverse momentum p.

Each entry is the integral over u of e^{-2pH cosh u} times a product of two
angular Mathieu functions at the complex angles pi/2 + phi +- iu and
parameter q = -(dp/2)^2.  The two factors are complex conjugates (real
coefficients), so the integral over the symmetric u-range folds to twice the
real part over [0, u_max]: 2*(Re1*Re2 + Im1*Im2) summed with Gauss-Legendre
weights.  Node counts double until the matrix is stable in max-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mathieu
from .backend import kernels
from .errors import InputError
from .mathieu import BasisIndex, Parity
from .quadrature import QuadratureSpec, gauss_legendre

__all__ = ["KernelMatrix", "kernel_matrix", "basis_indices"]


def basis_indices(m_max: int) -> list[BasisIndex]:
    """Standard basis ordering: even m = 0..m_max, then odd m = 1..m_max."""
    if m_max < 1:
        raise InputError(f"m_max must be >= 1, got {m_max}")
    return ([BasisIndex(Parity.EVEN, m) for m in range(m_max + 1)]
            + [BasisIndex(Parity.ODD, m) for m in range(1, m_max + 1)])


@dataclass(frozen=True)
class KernelMatrix:
    """Translation-kernel integrals at fixed momentum p.

    ``entries[i, j]`` couples ``indices[i]`` to ``indices[j]``; the matrix is
    real symmetric with strictly positive diagonal.
    """

    p: float
    H: float
    phi: float
    d: float
    m_max: int
    entries: np.ndarray
    indices: tuple[BasisIndex, ...]
    n_nodes: int
    u_max: float


def _u_range(p: float, H: float) -> float:
    """Integration cutoff: weight tail beyond it is below e^-30, with 20%
    inflation as margin for the angular factors."""
    return 1.2 * math.acosh(1.0 + 30.0 / (2.0 * p * H))


def kernel_entries(p: float, H: float, phi: float, d: float,
                   indices: list[BasisIndex], quad: QuadratureSpec
                   ) -> tuple[np.ndarray, int, float]:
    """(entries, nodes used, u_max) for an arbitrary index list."""
    s = (0.5 * d * p) ** 2
    u_max = _u_range(p, H)
    theta0 = 0.5 * math.pi + phi
    tables = [mathieu._negq_table(idx, s, u_max) for idx in indices]
    prev: np.ndarray | None = None
    n = quad.u_node_start
    while True:
        x, w = gauss_legendre(n)
        us = u_max * x
        wj = u_max * w * np.exp(-2.0 * p * H * np.cosh(us))
        ni = len(indices)
        fr = np.empty((ni, n))
        fi = np.empty((ni, n))
        for i, idx in enumerate(indices):
            kh, sg, lg = tables[i]
            re, im = kernels.angular_tables(
                kh.astype(np.float64), sg, lg, theta0, us,
                idx.parity is Parity.EVEN)
            fr[i] = re
            fi[i] = im
        entries = 2.0 * ((fr * wj) @ fr.T + (fi * wj) @ fi.T)
        ref = float(np.max(np.abs(entries)))
        if prev is not None:
            delta = float(np.max(np.abs(entries - prev)))
            if delta <= quad.u_tol * ref or ref == 0.0 or n >= quad.u_node_cap:
                return entries, n, u_max
        prev = entries
        if n >= quad.u_node_cap:
            return entries, n, u_max
        n = min(2 * n, quad.u_node_cap)


def kernel_matrix(p: float, H: float, phi: float, d: float, m_max: int,
                  quad: QuadratureSpec | None = None) -> KernelMatrix:
    """Full translation-kernel matrix over the standard basis ordering."""
    if not (p > 0.0 and math.isfinite(p)):
        raise InputError(f"momentum p must be positive and finite, got {p}")
    if not (H > 0.0 and math.isfinite(H)):
        raise InputError(f"separation H must be positive and finite, got {H}")
    if not (d > 0.0 and math.isfinite(d)):
        raise InputError(f"interfocal half-width d must be positive, got {d}")
    if not math.isfinite(phi):
        raise InputError(f"tilt angle phi must be finite, got {phi}")
    quad = quad or QuadratureSpec()
    idx = basis_indices(m_max)
    entries, n_nodes, u_max = kernel_entries(p, H, phi, d, idx, quad)
    return KernelMatrix(p=p, H=H, phi=phi, d=d, m_max=m_max,
                        entries=entries, indices=tuple(idx),
                        n_nodes=n_nodes, u_max=u_max)
