"""Quadrature building blocks: Gauss-Legendre tables, a Gauss-Kronrod 15(7)
panel rule, and a deterministic globally adaptive integrator.

The adaptive driver is deliberately self-contained (no scipy at runtime) and
deterministic: panels are split worst-first with insertion-order tie breaking,
and the final sum is accumulated left-to-right over panel midpoints so the
result is independent of the split discovery order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, InputError

__all__ = ["QuadratureSpec", "gauss_legendre", "kronrod_panel", "adaptive_gk"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs for the nested quadratures.

    p_rel_tol      relative tolerance for the outer (frequency) integral
    u_tol          relative max-norm tolerance for kernel-matrix entries
                   between successive node doublings
    p_max_factor   the outer integrand is cut off where the exponential
                   prefactor has decayed by exp(-p_max_factor)
    u_node_start   initial Gauss-Legendre node count for kernel integrals
    u_node_cap     hard ceiling for the node doubling ladder
    p_panel_cap    maximum number of adaptive panel splits
    """

    p_rel_tol: float = 1e-7
    u_tol: float = 1e-11
    p_max_factor: float = 40.0
    u_node_start: int = 40
    u_node_cap: int = 640
    p_panel_cap: int = 400

    def __post_init__(self) -> None:
        if not (0.0 < self.p_rel_tol <= 1e-4):
            raise InputError(f"p_rel_tol must be in (0, 1e-4], got {self.p_rel_tol}")
        if not (0.0 < self.u_tol <= 1e-4):
            raise InputError(f"u_tol must be in (0, 1e-4], got {self.u_tol}")
        if self.p_max_factor <= 0.0:
            raise InputError(f"p_max_factor must be positive, got {self.p_max_factor}")
        if self.u_node_start < 2 or self.u_node_cap < self.u_node_start:
            raise InputError("need 2 <= u_node_start <= u_node_cap")


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1], cached per order."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


# Gauss-Kronrod 15(7) on [-1, 1]; abscissae are symmetric, listed for the
# positive half with the center last.
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])


def kronrod_panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float
                  ) -> tuple[np.ndarray, float]:
    """15-point Kronrod estimate and error bound for ∫_a^b f.

    ``f`` maps an array of abscissae to an array of shape (npts,) or
    (npts, ncomp); vector-valued integrands are integrated per component and
    the error is taken over the component sum.
    """
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    xs = np.concatenate([c - h * _XGK[:-1], [c], c + h * _XGK[-2::-1]])
    fx = np.asarray(f(xs), dtype=float)
    flat = fx.ndim == 1
    if flat:
        fx = fx[:, None]
    n = len(_XGK)
    wk = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
    resk = h * (wk[:, None] * fx).sum(axis=0)
    # Gauss-7 uses every other Kronrod abscissa (indices 1, 3, 5 and center)
    gsel = [1, 3, 5, n - 1, 2 * n - 2 - 5, 2 * n - 2 - 3, 2 * n - 2 - 1]
    wg = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])
    resg = h * (wg[:, None] * fx[gsel]).sum(axis=0)
    diff = float(np.sum(resk) - np.sum(resg))
    scale = float(np.sum(np.abs(resk))) + 1e-300
    err = scale * min(1.0, (200.0 * abs(diff) / scale) ** 1.5)
    return (resk[0] if flat else resk), err


def adaptive_gk(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                rel_tol: float, panel_cap: int = 400
                ) -> tuple[np.ndarray, float]:
    """Globally adaptive Gauss-Kronrod integration of a vector integrand.

    Worst-panel-first bisection until the summed error estimate drops below
    rel_tol times the summed |integral|; raises ConvergenceError if the
    panel budget is exhausted first.  The returned value is re-accumulated
    over panels sorted by midpoint, so it does not depend on split order.
    """
    val, err = kronrod_panel(f, a, b)
    panels: list[tuple[float, int, float, float, np.ndarray, float]] = []
    counter = 0
    heapq.heappush(panels, (-err, counter, a, b, np.atleast_1d(val), err))
    while True:
        total = np.sum([p[4] for p in panels], axis=0)
        toterr = sum(p[5] for p in panels)
        target = rel_tol * max(float(np.sum(np.abs(total))), 1e-300)
        if toterr <= target:
            break
        if len(panels) >= panel_cap:
            raise ConvergenceError(
                f"adaptive quadrature: {panel_cap} panels insufficient for "
                f"rel_tol={rel_tol:g} (error {toterr:.3e}, target {target:.3e})")
        _, _, pa, pb, _, _ = heapq.heappop(panels)
        mid = 0.5 * (pa + pb)
        for lo, hi in ((pa, mid), (mid, pb)):
            v, e = kronrod_panel(f, lo, hi)
            counter += 1
            heapq.heappush(panels, (-e, counter, lo, hi, np.atleast_1d(v), e))
    ordered = sorted(panels, key=lambda p: 0.5 * (p[2] + p[3]))
    acc = np.zeros_like(ordered[0][4])
    for p in ordered:
        acc = acc + p[4]
    return acc, float(sum(p[5] for p in panels))
