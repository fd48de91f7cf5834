"""Numba-jitted implementations of the hot numerical kernels.

Loop translations of the algorithms in ``ellcas._kernels_numpy``; same
signatures, same algorithms except for the tridiagonal eigenpair, where a
Sturm-count bisection plus pivoted inverse iteration replaces the dense
LAPACK call (cheaper and jit-friendly for a single eigenpair).

All functions are nogil so sweep workers can overlap, and cache=True so
compilation cost is paid once per machine.
"""

import math

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_RESCALE = 1e250
_LOG_RESCALE = math.log(1e250)


@njit(cache=True, nogil=True)
def _sturm_count(diag, off, x):
    """Number of eigenvalues strictly below x (Sturm sequence sign count)."""
    n = diag.shape[0]
    q = diag[0] - x
    cnt = 1 if q < 0.0 else 0
    for i in range(1, n):
        if abs(q) < 1e-300:
            q = -1e-300 if q < 0.0 else 1e-300
        q = (diag[i] - x) - off[i - 1] * off[i - 1] / q
        if q < 0.0:
            cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def _tridiag_solve(diag, off, lam, x):
    """Solve (T - lam I) y = x in place for tridiagonal symmetric T,
    with partial pivoting (row swaps introduce a second superdiagonal)."""
    n = diag.shape[0]
    d0 = np.empty(n)
    d1 = np.empty(n)
    d2 = np.zeros(n)
    for i in range(n):
        d0[i] = diag[i] - lam
        d1[i] = off[i] if i < n - 1 else 0.0
    for i in range(n - 1):
        sub = off[i]
        if abs(d0[i]) < abs(sub):
            # pivot: swap row i with row i+1
            t0, t1, t2, tx = d0[i], d1[i], d2[i], x[i]
            d0[i] = sub
            d1[i] = d0[i + 1]
            d2[i] = d1[i + 1]
            x[i] = x[i + 1]
            m = t0 / d0[i]
            d0[i + 1] = t1 - m * d1[i]
            d1[i + 1] = t2 - m * d2[i]
            x[i + 1] = tx - m * x[i]
        else:
            piv = d0[i]
            if piv == 0.0:
                piv = 1e-300
                d0[i] = piv
            m = sub / piv
            d0[i + 1] -= m * d1[i]
            d1[i + 1] -= m * d2[i]
            x[i + 1] -= m * x[i]
    if d0[n - 1] == 0.0:
        d0[n - 1] = 1e-300
    x[n - 1] /= d0[n - 1]
    if n >= 2:
        x[n - 2] = (x[n - 2] - d1[n - 2] * x[n - 1]) / d0[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - d1[i] * x[i + 1] - d2[i] * x[i + 2]) / d0[i]


@njit(cache=True, nogil=True)
def tridiag_eigenpair(diag, off, idx):
    """idx-th (ascending) eigenpair by Sturm bisection + inverse iteration."""
    n = diag.shape[0]
    lo = diag[0]
    hi = diag[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < n - 1:
            r += abs(off[i])
        if diag[i] - r < lo:
            lo = diag[i] - r
        if diag[i] + r > hi:
            hi = diag[i] + r
    lo -= 1.0
    hi += 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _sturm_count(diag, off, mid) <= idx:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * (abs(lo) + abs(hi) + 1.0):
            break
    lam = 0.5 * (lo + hi)
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(3):
        _tridiag_solve(diag, off, lam, v)
        nrm = 0.0
        for i in range(n):
            nrm += v[i] * v[i]
        nrm = math.sqrt(nrm)
        for i in range(n):
            v[i] /= nrm
    # one Rayleigh-quotient polish of the eigenvalue
    num = 0.0
    for i in range(n):
        t = diag[i] * v[i]
        if i > 0:
            t += off[i - 1] * v[i - 1]
        if i < n - 1:
            t += off[i] * v[i + 1]
        num += v[i] * t
    return num, v


@njit(cache=True, nogil=True)
def log_bessel_i(nmax, x):
    """ln I_n(x), n = 0..nmax: Miller backward recurrence with rescaling."""
    m = max(nmax + 40, int(1.1 * x) + 40)
    raw = np.zeros(m + 2)
    offs = np.zeros(m + 2)
    shift = 0.0
    raw[m] = 1e-250
    for k in range(m, 0, -1):
        nxt = raw[k + 1] + (2.0 * k / x) * raw[k]
        if nxt > _RESCALE:
            nxt /= _RESCALE
            raw[k] /= _RESCALE
            shift += _LOG_RESCALE
        raw[k - 1] = nxt
        offs[k - 1] = shift
        offs[k] = shift
    top = -1e308
    for k in range(m + 1):
        if raw[k] > 0.0:
            rel = math.log(raw[k]) + offs[k] - offs[0]
            w = rel + (0.0 if k == 0 else math.log(2.0))
            if w > top:
                top = w
    acc = 0.0
    for k in range(m + 1):
        if raw[k] > 0.0:
            rel = math.log(raw[k]) + offs[k] - offs[0]
            w = rel + (0.0 if k == 0 else math.log(2.0))
            acc += math.exp(w - top)
    const = x - (top + math.log(acc))
    out = np.empty(nmax + 1)
    for k in range(nmax + 1):
        if raw[k] > 0.0:
            out[k] = math.log(raw[k]) + offs[k] - offs[0] + const
        else:
            out[k] = -np.inf
    return out


@njit(cache=True, nogil=True)
def log_bessel_k(nmax, x):
    """ln K_n(x), n = 0..nmax: trapezoid cosh integral + upward recurrence."""
    T = math.acosh(1.0 + 46.0 / x)
    h = 0.45 / math.sqrt(x) if x > 1.0 else 0.2
    if h > 0.2:
        h = 0.2
    n = int(T / h) + 1
    k0 = 0.0
    k1 = 0.0
    for j in range(n + 1):
        t = h * j
        w = 0.5 * h if j == 0 else h
        f = math.exp(-x * (math.cosh(t) - 1.0))
        k0 += w * f
        k1 += w * f * math.cosh(t)
    out = np.empty(nmax + 1)
    out[0] = math.log(k0) - x
    if nmax >= 1:
        out[1] = math.log(k1) - x
    shift = -x
    for nn in range(1, nmax):
        k2 = k0 + (2.0 * nn / x) * k1
        if k2 > _RESCALE:
            k2 /= _RESCALE
            k1 /= _RESCALE
            shift += _LOG_RESCALE
        out[nn + 1] = math.log(k2) + shift
        k0, k1 = k1, k2
    return out


@njit(cache=True, nogil=True)
def angular_tables(kh, sg, lg, theta0, us, even):
    """Even/odd trig series with signed log coefficients at theta0 + i*u.

    Per-node exponent shift B = max_k (ln|c_k| + k u) keeps every term in
    [0, 1] before the final e^B scaling.
    """
    nk = kh.shape[0]
    nu = us.shape[0]
    re = np.empty(nu)
    im = np.empty(nu)
    for j in range(nu):
        u = us[j]
        B = -1e308
        for i in range(nk):
            t = lg[i] + kh[i] * u
            if t > B:
                B = t
        accr = 0.0
        acci = 0.0
        for i in range(nk):
            if lg[i] == -np.inf:
                continue
            e1 = math.exp(lg[i] + kh[i] * u - B)
            e2 = math.exp(lg[i] - kh[i] * u - B)
            chp = 0.5 * (e1 + e2) * sg[i]
            shp = 0.5 * (e1 - e2) * sg[i]
            if even:
                accr += math.cos(kh[i] * theta0) * chp
                acci -= math.sin(kh[i] * theta0) * shp
            else:
                accr += math.sin(kh[i] * theta0) * chp
                acci += math.cos(kh[i] * theta0) * shp
        s = math.exp(B)
        re[j] = accr * s
        im[j] = acci * s
    return re, im


@njit(cache=True, nogil=True)
def lu_logdet(a):
    """(sign, ln|det|) by partially pivoted LU with pivot-magnitude logs."""
    a = a.copy()
    n = a.shape[0]
    sign = 1.0
    logdet = 0.0
    for k in range(n):
        piv = k
        big = abs(a[k, k])
        for i in range(k + 1, n):
            if abs(a[i, k]) > big:
                big = abs(a[i, k])
                piv = i
        pval = a[piv, k]
        if pval == 0.0:
            return 0.0, -np.inf
        if piv != k:
            for j in range(k, n):
                a[k, j], a[piv, j] = a[piv, j], a[k, j]
            sign = -sign
        pval = a[k, k]
        if pval < 0.0:
            sign = -sign
        logdet += math.log(abs(pval))
        for i in range(k + 1, n):
            m = a[i, k] / pval
            a[i, k] = m
            for j in range(k + 1, n):
                a[i, j] -= m * a[k, j]
    return sign, logdet
