"""Angular and modified radial Mathieu functions on the imaginary-frequency axis.

Conventions
-----------
* Expansions are built at positive parameter q.  The negative-parameter
  functions needed physically (q = -s with s > 0) are reached through the
  reflection identities S^e_m(z, -s) = (-1)^{m/2} S^e_m(pi/2 - z, s) for even
  m (partner class flips for odd m), applied at the coefficient level: the
  negative-parameter function is again a plain cosine/sine series in z whose
  coefficients are the partner's with alternating signs.
* Normalization: the trigonometric integral of S(theta)^2 over a full period
  is pi for every (parity, m, q); the m = 0 function has RMS value 1/sqrt(2).
* Sign: the coefficient of the leading harmonic (cos m*theta or sin m*theta)
  is positive.

Evaluation at complex angle theta0 + i*u works in shifted log space: every
term |c_k| e^{+-k u} is scaled by the largest term exponent before summation,
so growth up to the expansion's certified imaginary cap cannot overflow.
Coefficient tails below the eigenvector noise floor are regenerated from the
minimal-solution continued fraction of the three-term recurrence, keeping
full *relative* accuracy at every order; without this the noise floor
(~1e-16 of the peak) is re-amplified by e^{k u} and dominates the sum.
"""

from __future__ import annotations

import enum
import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import ConvergenceError, InputError, RangeError

__all__ = [
    "Parity", "BasisIndex", "RadialKind", "MathieuExpansion",
    "build_expansion", "angular", "angular_negq", "radial_modified",
    "expansion_to_json", "fresh_coefficient_cache",
]

_LN2 = math.log(2.0)
# certified relative size of the neglected tail at the imaginary cap
_TAIL_DROP = math.log(1e12)
# eigenvector entries below this (relative to the peak) are CF-regenerated
_NOISE_FLOOR = 1e-10
# public coefficient list is trimmed at this relative size
_TRIM = 1e-15
# longest coefficient table we are willing to build for complex-angle requests
_MAX_TABLE = 40000


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class RadialKind(enum.Enum):
    FIRST_KIND_MODIFIED = "I"
    OUTGOING_MODIFIED = "K"


@dataclass(frozen=True)
class BasisIndex:
    """(parity, order) label for one angular Mathieu function."""

    parity: Parity
    m: int

    def __post_init__(self) -> None:
        if not isinstance(self.parity, Parity):
            raise InputError(f"parity must be a Parity enum, got {self.parity!r}")
        if not isinstance(self.m, (int, np.integer)):
            raise InputError(f"order m must be an integer, got {self.m!r}")
        lo = 0 if self.parity is Parity.EVEN else 1
        if self.m < lo:
            raise InputError(
                f"order m >= {lo} required for {self.parity.value} parity, got {self.m}")


@dataclass(frozen=True, eq=False)
class MathieuExpansion:
    """Characteristic value and Fourier coefficients for one (parity, m, q).

    ``coeffs[j]`` multiplies cos(harmonics[j]*theta) (even parity) or
    sin(harmonics[j]*theta) (odd parity); harmonics step by 2 starting at
    m % 2 resp. 2 - m % 2.  The private table duplicates the coefficients in
    signed-log form, continued-fraction-stabilized and typically longer than
    the public list, for complex-angle evaluation up to ``u_cap``.
    """

    index: BasisIndex
    q: float
    char_value: float
    coeffs: np.ndarray
    n_terms: int
    _kh: np.ndarray = field(repr=False)
    _sg: np.ndarray = field(repr=False)
    _lg: np.ndarray = field(repr=False)
    _u_cap: float = field(repr=False)

    @property
    def harmonics(self) -> np.ndarray:
        return self._kh[: self.n_terms]

    @property
    def u_cap(self) -> float:
        """Largest |Im z| for which angular() is certified."""
        return self._u_cap


# ----------------------------------------------------------------------
# eigenproblem assembly

def _tridiag_system(parity: Parity, m: int, q: float, n: int):
    """Symmetric tridiagonal recurrence matrix, harmonic list, and the
    eigenvalue index that connects continuously to m^2 at q -> 0."""
    j = np.arange(n, dtype=float)
    off = np.full(n - 1, q)
    if parity is Parity.EVEN and m % 2 == 0:
        diag = (2.0 * j) ** 2
        off[0] = math.sqrt(2.0) * q
        kh = 2 * np.arange(n)
        nev = m // 2
    elif parity is Parity.EVEN:
        diag = (2.0 * j + 1.0) ** 2
        diag[0] += q
        kh = 2 * np.arange(n) + 1
        nev = (m - 1) // 2
    elif m % 2 == 1:
        diag = (2.0 * j + 1.0) ** 2
        diag[0] -= q
        kh = 2 * np.arange(n) + 1
        nev = (m - 1) // 2
    else:
        diag = (2.0 * j + 2.0) ** 2
        kh = 2 * np.arange(n) + 2
        nev = m // 2 - 1
    return diag, off, kh, nev


def _solve_recurrence(index: BasisIndex, q: float, tol: float):
    """Eigenpair of the three-term recurrence with a size-doubling retry
    ladder; returns (char_value, unit eigenvector, harmonic orders)."""
    n = max(2 * index.m + 20, int(math.ceil(2.0 * math.sqrt(q))) + 25)
    for _ in range(4):
        diag, off, kh, nev = _tridiag_system(index.parity, index.m, q, n)
        lam, vec = kernels.tridiag_eigenpair(diag, off, nev)
        resid = diag * vec - lam * vec
        resid[:-1] += off * vec[1:]
        resid[1:] += off * vec[:-1]
        scale = abs(lam) + q + 1.0
        vmax = float(np.max(np.abs(vec)))
        if (float(np.max(np.abs(resid))) <= tol * scale
                and abs(vec[-1]) <= 1e-13 * vmax):
            return float(lam), vec, kh
        n *= 2
    raise ConvergenceError(
        f"recurrence eigensolve did not converge for "
        f"(parity={index.parity.value}, m={index.m}, q={q:g})")


def _standard_coeffs(index: BasisIndex, vec: np.ndarray, kh: np.ndarray) -> np.ndarray:
    """Map the unit eigenvector to normalized, sign-fixed Fourier coefficients."""
    c = vec.astype(float).copy()
    if index.parity is Parity.EVEN and index.m % 2 == 0:
        c[0] /= math.sqrt(2.0)
        nrm = math.sqrt(2.0 * c[0] ** 2 + float(np.dot(c[1:], c[1:])))
    else:
        nrm = math.sqrt(float(np.dot(c, c)))
    c /= nrm
    jm = int(np.searchsorted(kh, index.m))
    if c[jm] < 0.0:
        c = -c
    return c


# ----------------------------------------------------------------------
# continued-fraction tail machinery

def _cf_ratios(parity: Parity, m: int, q: float, a: float,
               k_lo: int, k_hi: int) -> dict[int, float]:
    """Backward-recurrence ratios r_k = c_{k+2}/c_k of the minimal solution,
    for harmonics k = k_lo, k_lo+2, ..., k_hi.

    Seeded with r = 0 well above k_hi and iterated down; the only
    non-interior row is the harmonic-2 row of the (even, even-m) class,
    whose coupling to c_0 carries a factor 2.
    """
    ratios: dict[int, float] = {}
    r = 0.0
    k = k_hi + 80
    while k >= k_lo:
        denom = a - float(k + 2) ** 2 - q * r
        if abs(denom) < 1e-30:
            denom = -1e-30 if denom < 0.0 else 1e-30
        num = q
        if parity is Parity.EVEN and m % 2 == 0 and k == 0:
            num = 2.0 * q
        r = num / denom
        if k <= k_hi:
            ratios[k] = r
        k -= 2
    return ratios


def _signed_log_table(index: BasisIndex, q: float, a: float,
                      c: np.ndarray, kh: np.ndarray):
    """Signed-log coefficient table with CF-regenerated tail."""
    sg = np.sign(c)
    with np.errstate(divide="ignore"):
        lg = np.log(np.abs(c))
    peak = float(np.max(lg))
    reliable = np.nonzero(np.abs(c) >= _NOISE_FLOOR * math.exp(peak))[0]
    last = int(reliable[-1])
    if last < len(c) - 1:
        ratios = _cf_ratios(index.parity, index.m, q, a,
                            int(kh[last]), int(kh[-2]))
        for j in range(last, len(c) - 1):
            r = ratios[int(kh[j])]
            sg[j + 1] = sg[j] * (1.0 if r >= 0.0 else -1.0)
            lg[j + 1] = lg[j] + math.log(abs(r) + 5e-324)
    return sg, lg


def _u_cap_of(kh: np.ndarray, lg: np.ndarray) -> float:
    jp = int(np.argmax(lg))
    if kh[-1] <= kh[jp]:
        return math.inf
    cap = (lg[jp] - lg[-1] - _TAIL_DROP) / float(kh[-1] - kh[jp])
    return max(cap, 0.0)


def _extend_table(parity: Parity, m: int, q: float, a: float,
                  kh: np.ndarray, sg: np.ndarray, lg: np.ndarray,
                  u_need: float, twist: bool):
    """Append CF-generated harmonics until the tail criterion certifies
    u_need.  ``twist`` flips each appended ratio's sign (the alternating
    factor of the negative-parameter coefficient map)."""
    while _u_cap_of(kh, lg) < u_need:
        if len(kh) >= _MAX_TABLE:
            raise RangeError(
                f"imaginary argument {u_need:g} needs a coefficient table "
                f"beyond {_MAX_TABLE} harmonics (parity={parity.value}, "
                f"m={m}, q={q:g})")
        grow = 64
        k0 = int(kh[-1])
        ratios = _cf_ratios(parity, m, q, a, k0, k0 + 2 * grow)
        new_kh = np.concatenate([kh, k0 + 2 * np.arange(1, grow + 1)])
        new_sg = np.concatenate([sg, np.empty(grow)])
        new_lg = np.concatenate([lg, np.empty(grow)])
        base = len(kh)
        for i in range(grow):
            r = ratios[k0 + 2 * i]
            if twist:
                r = -r
            new_sg[base + i] = new_sg[base + i - 1] * (1.0 if r >= 0.0 else -1.0)
            new_lg[base + i] = new_lg[base + i - 1] + math.log(abs(r) + 5e-324)
        kh, sg, lg = new_kh, new_sg, new_lg
    return kh, sg, lg


# ----------------------------------------------------------------------
# public construction and evaluation

def build_expansion(index: BasisIndex, q: float, tol: float = 1e-10) -> MathieuExpansion:
    """Characteristic value and Fourier coefficients at positive parameter q."""
    if not isinstance(index, BasisIndex):
        raise InputError(f"index must be a BasisIndex, got {index!r}")
    q = float(q)
    if not (q > 0.0 and math.isfinite(q)):
        raise InputError(f"parameter q must be positive and finite, got {q}")
    if not (0.0 < tol <= 1e-6):
        raise InputError(f"tol must lie in (0, 1e-6], got {tol}")
    a, vec, kh = _solve_recurrence(index, q, tol)
    c = _standard_coeffs(index, vec, kh)
    sg, lg = _signed_log_table(index, q, a, c, kh)
    cut = np.nonzero(np.abs(c) < _TRIM * float(np.max(np.abs(c))))[0]
    n_keep = int(cut[0]) + 1 if len(cut) else len(c)
    return MathieuExpansion(
        index=index, q=q, char_value=a,
        coeffs=c[:n_keep].copy(), n_terms=n_keep,
        _kh=kh.astype(np.int64), _sg=sg, _lg=lg,
        _u_cap=_u_cap_of(kh, lg),
    )


def _eval_table(kh: np.ndarray, sg: np.ndarray, lg: np.ndarray,
                z: complex, even: bool) -> complex:
    """Series value at complex z from a signed-log table (u >= 0 assumed
    handled by the caller via Schwarz reflection)."""
    theta0 = float(z.real)
    u = float(z.imag)
    re, im = kernels.angular_tables(kh.astype(float), sg, lg, theta0,
                                    np.array([abs(u)]), even)
    val = complex(re[0], im[0])
    return val.conjugate() if u < 0.0 else val


def angular(exp: MathieuExpansion, z: complex) -> complex:
    """Angular function at complex angle z; exact real output for real z."""
    z = complex(z)
    if abs(z.imag) > exp.u_cap:
        raise RangeError(
            f"|Im z| = {abs(z.imag):g} exceeds the certified cap "
            f"{exp.u_cap:g} for (parity={exp.index.parity.value}, "
            f"m={exp.index.m}, q={exp.q:g})")
    return _eval_table(exp._kh, exp._sg, exp._lg, z,
                       exp.index.parity is Parity.EVEN)


# --- negative-parameter layer -----------------------------------------

def _partner_parity(parity: Parity, m: int) -> Parity:
    if m % 2 == 0:
        return parity
    return Parity.ODD if parity is Parity.EVEN else Parity.EVEN


class _NegqCache:
    """Signed-log coefficient tables of S^chi_m(z, -s), keyed by
    (parity, m, s), extended in place (under a lock) when a caller needs a
    larger imaginary cap."""

    def __init__(self, cap: int = 4096) -> None:
        self._data: dict[tuple, list] = {}
        self._lock = threading.Lock()
        self._cap = cap

    def get(self, index: BasisIndex, s: float, u_need: float):
        key = (index.parity, index.m, float(s))
        with self._lock:
            entry = self._data.get(key)
            if entry is None:
                entry = self._build(index, float(s))
                if len(self._data) >= self._cap:
                    self._data.clear()
                self._data[key] = entry
            kh, sg, lg, a, pp = entry
            if _u_cap_of(kh, lg) < u_need:
                kh, sg, lg = _extend_table(pp, index.m, float(s), a,
                                           kh, sg, lg, u_need, twist=True)
                entry[0], entry[1], entry[2] = kh, sg, lg
            return kh, sg, lg

    @staticmethod
    def _build(index: BasisIndex, s: float) -> list:
        pp = _partner_parity(index.parity, index.m)
        partner = build_expansion(BasisIndex(pp, index.m), s)
        kh = partner._kh
        # alternating-sign coefficient map of the reflection identity
        flip = np.where(((kh - index.m) // 2) % 2 == 0, 1.0, -1.0)
        return [kh, partner._sg * flip, partner._lg.copy(),
                partner.char_value, pp]


_NEGQ = _NegqCache()
_CACHE_TLS = threading.local()


@contextmanager
def fresh_coefficient_cache():
    """Run the calling thread against a private coefficient-table cache.

    Sweep drivers wrap each grid point in one of these so the point's
    arithmetic is a pure function of its own parameters: results can then
    never depend on task scheduling or on tables another thread extended,
    which keeps batch output bit-identical across worker counts.
    """
    prev = getattr(_CACHE_TLS, "cache", None)
    _CACHE_TLS.cache = _NegqCache()
    try:
        yield
    finally:
        if prev is None:
            del _CACHE_TLS.cache
        else:
            _CACHE_TLS.cache = prev


def _negq_table(index: BasisIndex, s: float, u_need: float):
    """CF-stabilized signed-log table of S^chi_m(., -s), certified to u_need."""
    cache = getattr(_CACHE_TLS, "cache", _NEGQ)
    return cache.get(index, s, u_need)


def angular_negq(index: BasisIndex, s: float, z: complex) -> complex:
    """S^chi_m(z, q=-s) for s > 0, via the reflection identity applied at
    the coefficient level (the result is again a cos/sin series in z)."""
    if not isinstance(index, BasisIndex):
        raise InputError(f"index must be a BasisIndex, got {index!r}")
    s = float(s)
    if not (s > 0.0 and math.isfinite(s)):
        raise InputError(f"parameter s must be positive and finite, got {s}")
    z = complex(z)
    kh, sg, lg = _negq_table(index, s, abs(z.imag))
    return _eval_table(kh, sg, lg, z, index.parity is Parity.EVEN)


# --- modified radial functions ----------------------------------------

def _logsumexp2(a: float, b: float) -> float:
    hi = a if a > b else b
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(math.exp(a - hi) + math.exp(b - hi))


def _bessel_deriv_logs(logz: np.ndarray, first_kind: bool) -> np.ndarray:
    """log |dZ_n/dx| from the ladder of log |Z_n|; the K-kind derivative is
    negative, the I-kind positive (signs handled by the caller)."""
    n = len(logz)
    out = np.empty(n)
    out[0] = logz[1]
    for i in range(1, n - 1):
        out[i] = _logsumexp2(logz[i - 1], logz[i + 1]) - _LN2
    if n >= 2:
        # top order: fall back to the recurrence Z'_n = Z_{n-1} -+ (n/x) Z_n;
        # only used when the caller over-allocates, kept for completeness
        out[n - 1] = logz[n - 2]
    return out


class _RadialTables:
    """Per-(s, mu) Bessel ladders shared across orders and kinds."""

    def __init__(self, s: float, mu: float, top: int) -> None:
        rs = math.sqrt(s)
        self.v1 = rs * math.exp(-mu)
        self.v2 = rs * math.exp(mu)
        if not math.isfinite(self.v2):
            raise RangeError(f"sqrt(s)*e^mu overflows for s={s:g}, mu={mu:g}")
        nio = top + 2
        if self.v1 > 0.0:
            self.log_i1 = kernels.log_bessel_i(nio, self.v1)
        else:  # e^{-mu} underflowed: exact x -> 0 limit
            self.log_i1 = np.full(nio + 1, -math.inf)
            self.log_i1[0] = 0.0
        self.log_i2 = kernels.log_bessel_i(nio, self.v2)
        self.log_k2 = kernels.log_bessel_k(nio, self.v2)
        self.log_i1p = _bessel_deriv_logs(self.log_i1, True)
        self.log_i2p = _bessel_deriv_logs(self.log_i2, True)
        self.log_k2p = _bessel_deriv_logs(self.log_k2, False)


def _table_span(kh: np.ndarray, lg: np.ndarray, m: int) -> int:
    """Largest offset index l with a non-negligible coefficient (relative
    log threshold -50, i.e. ~2e-22 of the peak)."""
    lg_peak = float(np.max(lg))
    keep = np.nonzero(lg >= lg_peak - 50.0)[0]
    k_cut = max(int(kh[keep[-1]]), m + 2)
    return (k_cut - m % 2) // 2


def _radial_core(kind: RadialKind, index: BasisIndex, s: float, mu: float,
                 kh: np.ndarray, sg: np.ndarray, lg: np.ndarray,
                 tables: _RadialTables | None = None):
    """(sign, log|value|, sign', log|d/dmu|) of the modified radial function.

    Cross-product series over integer offset l: the angular coefficient of
    harmonic k = 2l + (m mod 2) multiplies I_{|l-d1|}(v1) W_{|l+d2|}(v2),
    where W is I (first kind) or K (outgoing); the dominant l pairs the peak
    coefficient with I_0(v1) W_m(v2), so no term cancellation occurs at
    large order.  Normalized to match the cylindrical analog as mu -> inf.
    """
    m = index.m
    modd = m % 2
    d1, d2 = m // 2, (m + 1) // 2
    lmax = _table_span(kh, lg, m)
    if tables is None:
        tables = _RadialTables(s, mu, lmax + d2)
    is_k = kind is RadialKind.OUTGOING_MODIFIED
    log_w = tables.log_k2 if is_k else tables.log_i2
    log_wp = tables.log_k2p if is_k else tables.log_i2p
    wp_sign = -1.0 if is_k else 1.0
    lv1 = math.log(tables.v1) if tables.v1 > 0.0 else -math.inf
    lv2 = math.log(tables.v2)

    j0 = int(kh[0])  # smallest harmonic in the table
    t_sg = []
    t_lg = []
    d_sg = []
    d_lg = []
    for l in range(-lmax, lmax + 1):
        k = 2 * l + modd
        j = (abs(k) - j0) // 2
        if j < 0 or j >= len(kh) or lg[j] == -math.inf:
            continue
        w_lg = lg[j] - (0.0 if k == 0 else _LN2)
        w_sg = sg[j]
        if index.parity is Parity.ODD and k < 0:
            w_sg = -w_sg
        if is_k and (l + d2) % 2 != 0:
            w_sg = -w_sg
        a_i = abs(l - d1)
        b_i = abs(l + d2)
        t_sg.append(w_sg)
        t_lg.append(w_lg + tables.log_i1[a_i] + log_w[b_i])
        d_sg.append(-w_sg)
        d_lg.append(w_lg + lv1 + tables.log_i1p[a_i] + log_w[b_i])
        d_sg.append(w_sg * wp_sign)
        d_lg.append(w_lg + lv2 + tables.log_i1[a_i] + log_wp[b_i])

    jm = (m - j0) // 2
    ln_norm = lg[jm] - (_LN2 if m > 0 else 0.0)
    norm_sg = sg[jm] * ((-1.0) ** m if is_k else 1.0)

    def _fold(sgs, lgs):
        hi = max(lgs)
        if hi == -math.inf:
            return 0.0, -math.inf
        acc = 0.0
        for sgn, lgv in zip(sgs, lgs):
            acc += sgn * math.exp(lgv - hi)
        if acc == 0.0:
            return 0.0, -math.inf
        return math.copysign(1.0, acc), hi + math.log(abs(acc))

    vs, vl = _fold(t_sg, t_lg)
    ds, dl = _fold(d_sg, d_lg)
    return vs * norm_sg, vl - ln_norm, ds * norm_sg, dl - ln_norm


def radial_modified(kind: RadialKind, index: BasisIndex, s: float, mu: float
                    ) -> tuple[float, float]:
    """Modified radial function of the first (I) or outgoing (K) kind and
    its mu-derivative, normalized to the cylindrical analog at large mu."""
    if not isinstance(kind, RadialKind):
        raise InputError(f"kind must be a RadialKind, got {kind!r}")
    if not isinstance(index, BasisIndex):
        raise InputError(f"index must be a BasisIndex, got {index!r}")
    s = float(s)
    mu = float(mu)
    if not (s > 0.0 and math.isfinite(s)):
        raise InputError(f"parameter s must be positive and finite, got {s}")
    if mu < 0.0:
        raise InputError(f"radial coordinate mu must be >= 0, got {mu}")
    kh, sg, lg = _negq_table(index, s, 0.0)
    vs, vl, ds, dl = _radial_core(kind, index, s, mu, kh, sg, lg)
    if vl > 709.0 or dl > 709.0:
        raise RangeError(
            f"radial function overflows double range at s={s:g}, mu={mu:g} "
            f"(parity={index.parity.value}, m={index.m})")
    value = vs * math.exp(vl) if vl > -math.inf else 0.0
    deriv = ds * math.exp(dl) if dl > -math.inf else 0.0
    if mu == 0.0 and kind is RadialKind.FIRST_KIND_MODIFIED:
        # reflection symmetry in mu makes these zeros exact
        if index.parity is Parity.ODD:
            value = 0.0
        else:
            deriv = 0.0
    return value, deriv


def expansion_to_json(exp: MathieuExpansion) -> dict:
    """Plain-dict dump for debugging and CLI output."""
    return {
        "parity": exp.index.parity.value,
        "m": exp.index.m,
        "q": exp.q,
        "char_value": exp.char_value,
        "n_terms": exp.n_terms,
        "coeffs": [float(x) for x in exp.coeffs],
    }
