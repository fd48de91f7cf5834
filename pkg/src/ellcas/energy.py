"""Interaction-energy assembly: round-trip log-determinant integrand,
frequency integration, boundary-condition channel sums, and truncation-order
extrapolation.

The dimensionless energy per unit length is (1/4pi) * int_0^inf p dp
log det[1 - diag(T) T^P U(p)] summed over the Dirichlet and Neumann channels.
The determinant is evaluated in symmetrized form 1 - S U S with
S = diag(sqrt(T*T^P)) >= 0, assembled entrywise in log space so that
exponentially large T-elements and exponentially small kernel entries never
meet a floating-point overflow.  The p-integral is mapped onto t = e^{-lam p}
with lam = twice the closest-approach gap, then integrated adaptively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scattering
from .backend import kernels
from .errors import InputError, NumericalError
from .mathieu import BasisIndex, Parity
from .quadrature import QuadratureSpec, adaptive_gk
from .scattering import BoundaryCondition, EllipticSurface
from .translation import basis_indices, kernel_entries

__all__ = [
    "Geometry", "QuadratureSpec", "EnergyResult", "logdet_integrand",
    "casimir_energy", "em_energy", "extrapolate", "sector_indices",
    "DEFAULT_LADDER",
]

DEFAULT_LADDER = (4, 6, 8, 12, 16)


@dataclass(frozen=True)
class Geometry:
    """Cylinder cross-section, center-to-plane distance H, and tilt phi
    (angle between the ellipse's major axis and the plane)."""

    surface: EllipticSurface
    H: float
    phi: float

    def __post_init__(self) -> None:
        if not isinstance(self.surface, EllipticSurface):
            raise InputError(f"surface must be an EllipticSurface, got {self.surface!r}")
        if not (self.H > 0.0 and math.isfinite(self.H)):
            raise InputError(f"separation H must be positive and finite, got {self.H}")
        if not math.isfinite(self.phi):
            raise InputError(f"tilt angle phi must be finite, got {self.phi}")
        if self.H <= self.reach:
            raise InputError(
                f"surfaces intersect: H = {self.H:g} does not clear the "
                f"cylinder's extent {self.reach:g} toward the plane")

    @property
    def reach(self) -> float:
        """Largest distance from the cylinder axis toward the plane, i.e.
        max over theta of the rotated cross-section's projection."""
        d, mu0 = self.surface.d, self.surface.mu0
        sp, cp = math.sin(self.phi), math.cos(self.phi)
        return d * math.sqrt((math.cosh(mu0) * sp) ** 2
                             + (math.sinh(mu0) * cp) ** 2)

    @property
    def gap(self) -> float:
        """Closest approach between the cylinder surface and the plane."""
        return self.H - self.reach


@dataclass(frozen=True)
class EnergyResult:
    """Dimensionless channel-summed energy with its truncation series.

    ``value`` is the energy at the requested truncation order, scaled by the
    square of the declared unit length ('d' or 'H'); ``series`` holds
    (m_max, value) pairs along the truncation ladder; ``extrapolated`` is the
    exponential-model limit of the last three; ``err_estimate`` bounds the
    truncation error (at least half the last observed step).
    """

    value: float
    channel_values: dict
    series: list
    extrapolated: float
    err_estimate: float
    scale: str

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "channel_values": dict(self.channel_values),
            "series": [[int(m), float(v)] for m, v in self.series],
            "extrapolated": self.extrapolated,
            "err_estimate": self.err_estimate,
            "scale": self.scale,
        }


def _logdet_from_parts(log_s: np.ndarray, u_mat: np.ndarray, sub: np.ndarray,
                       p: float, geom: Geometry, bc: BoundaryCondition) -> float:
    """log det(1 - S U S) on a basis subset; rows with log S = -inf (strip
    zeros) are dropped rather than carried as zero rows."""
    ls = log_s[sub]
    keep = sub[np.isfinite(ls)]
    if len(keep) == 0:
        return 0.0
    ls = log_s[keep]
    usub = u_mat[np.ix_(keep, keep)]
    with np.errstate(divide="ignore"):
        lt = ls[:, None] + ls[None, :] + np.log(np.abs(usub))
    a = np.sign(usub) * np.exp(lt)
    m = np.eye(len(keep)) - a
    sign, logdet = kernels.lu_logdet(m)
    if sign <= 0.0 or logdet > 1e-9:
        raise NumericalError(
            "round-trip determinant left (0, 1]",
            p=p, H=geom.H, phi=geom.phi, d=geom.surface.d,
            mu0=geom.surface.mu0, bc=bc.value,
            det_sign=sign, logdet=logdet)
    return min(logdet, 0.0)


def logdet_integrand(p: float, geom: Geometry, bc: BoundaryCondition,
                     m_max: int, quad: QuadratureSpec | None = None,
                     indices: list[BasisIndex] | None = None) -> float:
    """log det[1 - diag(T) T^P U] at one momentum; <= 0 for valid geometry.

    ``indices`` restricts the basis (used for sector-decoupling checks);
    by default the full basis up to m_max is used.
    """
    if not (p > 0.0 and math.isfinite(p)):
        raise InputError(f"momentum p must be positive and finite, got {p}")
    quad = quad or QuadratureSpec()
    idxs = list(indices) if indices is not None else basis_indices(m_max)
    u_mat, _, _ = kernel_entries(p, geom.H, geom.phi, geom.surface.d, idxs, quad)
    s = (0.5 * geom.surface.d * p) ** 2
    log_d, log_n = scattering.scatter_log_diag_both(geom.surface, s, idxs)
    log_s = log_d if bc is BoundaryCondition.DIRICHLET else log_n
    return _logdet_from_parts(log_s, u_mat, np.arange(len(idxs)), p, geom, bc)


def _ladder_curves(geom: Geometry, m_list: list[int], quad: QuadratureSpec
                   ) -> np.ndarray:
    """Unscaled channel energies, shape (2, len(m_list)): row 0 Dirichlet,
    row 1 Neumann.

    One adaptive pass integrates every (channel, truncation) pair at once:
    the kernel matrix at the largest order is computed per node and each
    smaller order evaluates its determinant on the leading sub-basis.
    """
    lam = 2.0 * geom.gap
    full = basis_indices(max(m_list))
    subs = [np.array([i for i, ix in enumerate(full) if ix.m <= m])
            for m in m_list]
    t_min = math.exp(-quad.p_max_factor)
    surface = geom.surface

    def f(ts: np.ndarray) -> np.ndarray:
        out = np.empty((len(ts), 2 * len(m_list)))
        for i, t in enumerate(ts):
            p = -math.log(t) / lam
            u_mat, _, _ = kernel_entries(p, geom.H, geom.phi, surface.d,
                                         full, quad)
            s = (0.5 * surface.d * p) ** 2
            log_d, log_n = scattering.scatter_log_diag_both(surface, s, full)
            fac = p / (4.0 * math.pi * lam * t)
            for j, sub in enumerate(subs):
                out[i, 2 * j] = fac * _logdet_from_parts(
                    log_d, u_mat, sub, p, geom, BoundaryCondition.DIRICHLET)
                out[i, 2 * j + 1] = fac * _logdet_from_parts(
                    log_n, u_mat, sub, p, geom, BoundaryCondition.NEUMANN)
        return out

    val, _ = adaptive_gk(f, t_min, 1.0, quad.p_rel_tol, quad.p_panel_cap)
    return val.reshape(len(m_list), 2).T


def _scale_length(geom: Geometry, scale: str) -> float:
    if scale == "d":
        return geom.surface.d
    if scale == "H":
        return geom.H
    raise InputError(f"scale must be 'd' or 'H', got {scale!r}")


def casimir_energy(geom: Geometry, bc: BoundaryCondition, m_max: int,
                   quad: QuadratureSpec | None = None, scale: str = "d") -> float:
    """Single-channel dimensionless energy at fixed truncation order."""
    if not isinstance(bc, BoundaryCondition):
        raise InputError(f"bc must be a BoundaryCondition, got {bc!r}")
    quad = quad or QuadratureSpec()
    sl = _scale_length(geom, scale)
    curves = _ladder_curves(geom, [int(m_max)], quad)
    row = 0 if bc is BoundaryCondition.DIRICHLET else 1
    return float(curves[row, 0]) * sl * sl


def _build_ladder(m_max: int, ladder) -> list[int]:
    if ladder is not None:
        lad = [int(m) for m in ladder]
        if any(b <= a for a, b in zip(lad, lad[1:])):
            raise InputError(f"ladder must be strictly increasing, got {lad}")
        if lad[-1] != m_max:
            raise InputError(f"ladder must end at m_max={m_max}, got {lad}")
        return lad
    lad = sorted({m for m in DEFAULT_LADDER if m <= m_max} | {int(m_max)})
    step = 2
    while len(lad) < 3 and lad[0] - step >= 1:
        lad.insert(0, lad[0] - step)
    return lad


def em_energy(geom: Geometry, m_max: int = 16,
              quad: QuadratureSpec | None = None, scale: str = "d",
              ladder=None) -> EnergyResult:
    """Electromagnetic (Dirichlet + Neumann) energy with truncation series,
    exponential extrapolation, and an error estimate."""
    if m_max < 1:
        raise InputError(f"m_max must be >= 1, got {m_max}")
    quad = quad or QuadratureSpec()
    lad = _build_ladder(int(m_max), ladder)
    sl = _scale_length(geom, scale)
    curves = _ladder_curves(geom, lad, quad) * sl * sl
    e_d = curves[0]
    e_n = curves[1]
    e_em = e_d + e_n
    series = [(m, float(v)) for m, v in zip(lad, e_em)]
    if len(series) >= 3:
        extrapolated, xerr = extrapolate(series)
    else:
        extrapolated, xerr = series[-1][1], abs(series[-1][1] - series[0][1])
    last_gap = abs(series[-1][1] - series[-2][1]) if len(series) >= 2 else 0.0
    value = series[-1][1]
    if not value < 0.0:
        raise NumericalError(
            "channel-summed energy came out non-negative",
            value=value, H=geom.H, phi=geom.phi)
    return EnergyResult(
        value=value,
        channel_values={"dirichlet": float(e_d[-1]), "neumann": float(e_n[-1])},
        series=series,
        extrapolated=float(extrapolated),
        err_estimate=float(max(xerr, 0.5 * last_gap)),
        scale=scale,
    )


def extrapolate(series) -> tuple[float, float]:
    """Limit of an exponentially converging truncation series.

    Fits v(m) = v_inf + A e^{-b m} through the last three points; returns
    (v_inf, |v_inf - last|).  A non-decaying or sign-flipping gap sequence
    falls back to the last value with the last gap as the error.
    """
    pts = [(int(m), float(v)) for m, v in series]
    if len(pts) < 3:
        raise InputError(f"extrapolation needs >= 3 series points, got {len(pts)}")
    if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
        raise InputError("series m_max values must be strictly increasing")
    (m1, v1), (m2, v2), (m3, v3) = pts[-3:]
    g1, g2 = v2 - v1, v3 - v2
    if g1 == 0.0 and g2 == 0.0:
        return v3, 0.0
    if g2 == 0.0:
        return v3, 0.0
    if g1 == 0.0 or (g1 < 0.0) != (g2 < 0.0) or abs(g2) >= abs(g1):
        return v3, abs(g2)
    d1, d2 = m2 - m1, m3 - m2
    rho = g2 / g1

    def ratio(x: float) -> float:
        return x ** d1 * (x ** d2 - 1.0) / (x ** d1 - 1.0)

    if rho >= ratio(1.0 - 1e-12):
        return v3, abs(g2)
    lo, hi = 0.0, 1.0 - 1e-12
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ratio(mid) < rho:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    xd2 = x ** d2
    v_inf = v3 + g2 * xd2 / (1.0 - xd2)
    return v_inf, abs(v_inf - v3)


def sector_indices(phi: float, m_max: int):
    """The two decoupled index sets at phi = 0 or phi = pi/2, else None.

    At phi = pi/2 the even and odd parity classes decouple; at phi = 0 the
    sectors pair each class with the matching order parity (cosine-like with
    even m, sine-like with odd m, and vice versa).
    """
    full = basis_indices(m_max)
    if abs(phi - 0.5 * math.pi) < 1e-12:
        a = [ix for ix in full if ix.parity is Parity.EVEN]
        b = [ix for ix in full if ix.parity is Parity.ODD]
        return a, b
    if abs(phi) < 1e-12:
        a = [ix for ix in full
             if (ix.parity is Parity.EVEN) == (ix.m % 2 == 0)]
        b = [ix for ix in full
             if (ix.parity is Parity.EVEN) != (ix.m % 2 == 0)]
        return a, b
    return None
