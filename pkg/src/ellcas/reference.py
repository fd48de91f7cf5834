"""Independent reference results: the proximity-force closed form, the
circular-cylinder/plane energy built purely from cylindrical Bessel
functions, and two identity validators (free-space Green's function and
plane-wave expansion) that exercise the special-function stack end to end.

The cylinder oracle shares no Mathieu machinery with the main pipeline, so
agreement at small eccentricity is a genuine cross-check of the whole chain:
T-elements, translation kernel, determinant, and frequency integration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import InputError, NumericalError
from .mathieu import (BasisIndex, Parity, RadialKind, angular_negq,
                      radial_modified)
from .quadrature import QuadratureSpec, adaptive_gk
from .scattering import BoundaryCondition

__all__ = [
    "PfaInput", "pfa_energy", "cylinder_plane_energy",
    "greens_equivalence_residual", "planewave_expansion_residual",
    "HALF_PLANE_SINGLE", "HALF_PLANE_SUPERPOSED",
]

# Known magnitudes of E*d^2 for a conducting half-plane at distance d above
# a plane (single edge), and the estimate obtained by superposing two such
# half-plane results (8/9 of the single value).  Annotation constants only;
# nothing here recomputes them.
HALF_PLANE_SINGLE = 0.00674
HALF_PLANE_SUPERPOSED = 0.00599

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PfaInput:
    """Geometry for the proximity-force estimate."""

    H: float
    d: float
    phi: float

    def __post_init__(self) -> None:
        if not (self.H > 0.0 and self.d > 0.0):
            raise InputError(f"H and d must be positive, got H={self.H}, d={self.d}")
        if self.H <= self.d * abs(math.sin(self.phi)):
            raise InputError(
                f"proximity-force estimate undefined: H = {self.H:g} does not "
                f"exceed d|sin phi| = {self.d * abs(math.sin(self.phi)):g}")


def pfa_energy(inp: PfaInput) -> float:
    """Proximity-force estimate of the strip/plane energy, scaled by d^2."""
    if not isinstance(inp, PfaInput):
        raise InputError(f"expected PfaInput, got {inp!r}")
    cos_phi = math.cos(inp.phi)
    if abs(cos_phi) < 1e-14:
        # an edge-on strip subtends no area facing the plane; snap the
        # rounding residue of cos(pi/2) so the estimate is exactly zero
        return 0.0
    num = inp.H * inp.d * cos_phi
    den = (inp.H ** 2 - (inp.d * math.sin(inp.phi)) ** 2) ** 2
    return -(math.pi ** 2 / 360.0) * num / den * inp.d ** 2


def _logsumexp2(a: float, b: float) -> float:
    hi = a if a > b else b
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(math.exp(a - hi) + math.exp(b - hi))


def _cyl_log_t(bc: BoundaryCondition, x: float, m_max: int) -> np.ndarray:
    """log of the positive round-trip products I_m/K_m (Dirichlet) or
    -I'_m/K'_m (Neumann) for m = 0..m_max."""
    li = kernels.log_bessel_i(m_max + 1, x)
    lk = kernels.log_bessel_k(m_max + 1, x)
    out = np.empty(m_max + 1)
    for m in range(m_max + 1):
        if bc is BoundaryCondition.DIRICHLET:
            out[m] = li[m] - lk[m]
        else:
            lip = li[1] if m == 0 else _logsumexp2(li[m - 1], li[m + 1]) - _LN2
            lkp = lk[1] if m == 0 else _logsumexp2(lk[m - 1], lk[m + 1]) - _LN2
            out[m] = lip - lkp
    return out


def _cyl_logdet(p: float, r: float, h: float, bc: BoundaryCondition,
                m_max: int) -> float:
    ms = np.arange(-m_max, m_max + 1)
    log_t = _cyl_log_t(bc, p * r, m_max)
    log_s = 0.5 * log_t[np.abs(ms)]
    log_k = kernels.log_bessel_k(2 * m_max, 2.0 * p * h)
    lt = log_s[:, None] + log_s[None, :] + log_k[np.abs(ms[:, None] + ms[None, :])]
    m = np.eye(len(ms)) - np.exp(lt)
    sign, logdet = kernels.lu_logdet(m)
    if sign <= 0.0 or logdet > 1e-9:
        raise NumericalError("cylinder round-trip determinant left (0, 1]",
                             p=p, R=r, H=h, bc=bc.value, det_sign=sign)
    return min(logdet, 0.0)


def cylinder_plane_energy(R: float, H: float, bc: BoundaryCondition,
                          m_max: int, quad: QuadratureSpec | None = None) -> float:
    """Channel energy of a circular cylinder (radius R) above a plane,
    scaled by H^2, from cylindrical Bessel functions only."""
    if not (0.0 < R < H):
        raise InputError(f"need 0 < R < H, got R={R}, H={H}")
    if not isinstance(bc, BoundaryCondition):
        raise InputError(f"bc must be a BoundaryCondition, got {bc!r}")
    if m_max < 1:
        raise InputError(f"m_max must be >= 1, got {m_max}")
    quad = quad or QuadratureSpec()
    lam = 2.0 * (H - R)
    t_min = math.exp(-quad.p_max_factor)

    def f(ts: np.ndarray) -> np.ndarray:
        out = np.empty(len(ts))
        for i, t in enumerate(ts):
            p = -math.log(t) / lam
            out[i] = p * _cyl_logdet(p, R, H, bc, m_max) / (4.0 * math.pi * lam * t)
        return out

    val, _ = adaptive_gk(f, t_min, 1.0, quad.p_rel_tol, quad.p_panel_cap)
    return float(val[0]) * H * H


def _chart_point(point) -> tuple[float, float]:
    try:
        mu, theta = float(point[0]), float(point[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"point must be a (mu, theta) pair, got {point!r}") from exc
    if mu < 0.0:
        raise InputError(f"radial coordinate mu must be >= 0, got {mu}")
    return mu, theta


def _both_classes(m: int):
    yield BasisIndex(Parity.EVEN, m)
    if m >= 1:
        yield BasisIndex(Parity.ODD, m)


def greens_equivalence_residual(p: float, point1, point2, d: float,
                                m_sum_max: int) -> float:
    """Relative difference between the separated-coordinates mode sum for
    the free Green's function at transverse momentum p and its closed
    Cartesian form K_0(p|rho1 - rho2|)/2 (both sides carry the same 1/pi)."""
    if not (p > 0.0 and d > 0.0):
        raise InputError(f"need p > 0 and d > 0, got p={p}, d={d}")
    mu1, th1 = _chart_point(point1)
    mu2, th2 = _chart_point(point2)
    z1 = d * np.cosh(complex(mu1, th1))
    z2 = d * np.cosh(complex(mu2, th2))
    rho = abs(z2 - z1)
    if rho == 0.0:
        raise InputError("points must be distinct")
    s = (0.5 * d * p) ** 2
    mu_lo, mu_hi = min(mu1, mu2), max(mu1, mu2)
    tot = 0.0
    for m in range(m_sum_max + 1):
        for idx in _both_classes(m):
            a1 = angular_negq(idx, s, th1).real
            a2 = angular_negq(idx, s, th2).real
            ri = radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, s, mu_lo)[0]
            rk = radial_modified(RadialKind.OUTGOING_MODIFIED, idx, s, mu_hi)[0]
            tot += a1 * a2 * ri * rk
    ref = 0.5 * math.exp(kernels.log_bessel_k(0, p * rho)[0])
    return abs(tot - ref) / abs(ref)


def planewave_expansion_residual(kappa: float, k_x: float, k_z: float,
                                 point, d: float, m_sum_max: int) -> float:
    """Relative residual of the plane-wave-to-elliptic-modes expansion at
    imaginary frequency: e^{i k_x x - p cosh(u) y} against the mode sum
    2 sum_m (-1)^m S_m(complex angle) S_m(theta) I_m(mu), with
    p = sqrt(kappa^2 + k_z^2) and sinh u = k_x / p."""
    if not (kappa > 0.0):
        raise InputError(f"kappa must be positive, got {kappa}")
    if not (d > 0.0):
        raise InputError(f"d must be positive, got {d}")
    mu, th = _chart_point(point)
    p = math.hypot(kappa, k_z)
    u = math.asinh(k_x / p)
    s = (0.5 * d * p) ** 2
    x = d * math.cosh(mu) * math.cos(th)
    y = d * math.sinh(mu) * math.sin(th)
    lhs = cmath.exp(complex(-p * math.cosh(u) * y, k_x * x))
    zk = complex(0.5 * math.pi, u)
    tot = 0.0 + 0.0j
    for m in range(m_sum_max + 1):
        for idx in _both_classes(m):
            sk = angular_negq(idx, s, zk)
            st = angular_negq(idx, s, th).real
            ri = radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, s, mu)[0]
            tot += 2.0 * (-1.0) ** m * sk * st * ri
    return abs(tot - lhs) / abs(lhs)
