"""Pure-numpy implementations of the hot numerical kernels.

Signature-compatible with ``ellcas._kernels_numba``; selected via
``ELLCAS_BACKEND=numpy`` or automatically when numba is unavailable.

Conventions shared by both backends:

* Bessel ladders are returned as natural logs (the callers assemble
  products of I/K values in log space, so magnitudes like K_40(1e-3)
  never have to exist as doubles).
* ``angular_tables`` evaluates an even/odd trigonometric series with
  signed log-magnitude coefficients at complex angle theta0 + i*u for a
  vector of u nodes, shifting exponents per node so that e^{k u} growth
  never overflows intermediate terms.
"""

import numpy as np

BACKEND_NAME = "numpy"

_RESCALE = 1e250
_LOG_RESCALE = np.log(_RESCALE)


def tridiag_eigenpair(diag, off, idx):
    """idx-th (ascending) eigenpair of a symmetric tridiagonal matrix.

    The numpy path just densifies and calls LAPACK via ``np.linalg.eigh``;
    the matrices involved are small (tens to a few hundred rows).
    """
    n = diag.shape[0]
    a = np.zeros((n, n))
    a[np.arange(n), np.arange(n)] = diag
    a[np.arange(n - 1), np.arange(1, n)] = off
    a[np.arange(1, n), np.arange(n - 1)] = off
    w, v = np.linalg.eigh(a)
    return w[idx], v[:, idx].copy()


def log_bessel_i(nmax, x):
    """ln I_n(x) for n = 0..nmax, x > 0, by Miller's backward recurrence.

    Downward recurrence I_{k-1} = I_{k+1} + (2k/x) I_k is dominated by the
    minimal solution; values grow toward k = 0 and are renormalized at the
    end through e^x = I_0 + 2 sum_{k>=1} I_k.  Intermediate growth is kept
    in range by rescaling with a per-index log offset.
    """
    m = max(nmax + 40, int(1.1 * x) + 40)
    raw = np.zeros(m + 2)
    offs = np.zeros(m + 2)
    shift = 0.0
    raw[m + 1] = 0.0
    raw[m] = 1e-250
    offs[m + 1] = offs[m] = 0.0
    for k in range(m, 0, -1):
        nxt = raw[k + 1] + (2.0 * k / x) * raw[k]
        if nxt > _RESCALE:
            nxt /= _RESCALE
            raw[k] /= _RESCALE
            shift += _LOG_RESCALE
        raw[k - 1] = nxt
        offs[k - 1] = shift
        offs[k] = shift  # current pair shares the running scale
    # normalization: logsumexp of ln(raw) + (offs[0] - offs[k]) with weights 1, 2, 2, ...
    lg = np.where(raw[:m + 1] > 0.0, np.log(np.maximum(raw[:m + 1], 1e-300)), -np.inf)
    rel = lg - (offs[0] - offs[:m + 1])
    wlog = rel + np.log(2.0)
    wlog[0] = rel[0]
    top = wlog.max()
    lsum = top + np.log(np.sum(np.exp(wlog - top)))
    const = x - lsum  # ln of the factor turning scaled values into true I
    return (rel + const)[:nmax + 1]


def _k01_scaled(x):
    """e^x K_0(x) and e^x K_1(x) via the cosh integral representation.

    K_n(x) = int_0^inf e^{-x cosh t} cosh(n t) dt; the integrand is even,
    analytic, and doubly-exponentially decaying, so a plain trapezoid rule
    converges geometrically.  Step size shrinks like 1/sqrt(x) to resolve
    the Gaussian core at large x.
    """
    T = np.arccosh(1.0 + 46.0 / x)
    h = min(0.2, 0.45 / np.sqrt(max(x, 1.0)))
    n = int(T / h) + 1
    t = h * np.arange(n + 1)
    w = np.full(n + 1, h)
    w[0] = 0.5 * h
    f = np.exp(-x * (np.cosh(t) - 1.0))
    k0 = np.sum(w * f)
    k1 = np.sum(w * f * np.cosh(t))
    return k0, k1


def log_bessel_k(nmax, x):
    """ln K_n(x) for n = 0..nmax, x > 0.

    K_0, K_1 from the trapezoid integral; higher orders by the (stable)
    upward recurrence K_{n+1} = K_{n-1} + (2n/x) K_n with log-offset
    rescaling so arbitrarily large orders never overflow.
    """
    out = np.empty(nmax + 1)
    k0, k1 = _k01_scaled(x)
    out[0] = np.log(k0) - x
    if nmax >= 1:
        out[1] = np.log(k1) - x
    shift = -x
    for n in range(1, nmax):
        k2 = k0 + (2.0 * n / x) * k1
        if k2 > _RESCALE:
            k2 /= _RESCALE
            k1 /= _RESCALE
            shift += _LOG_RESCALE
        out[n + 1] = np.log(k2) + shift
        k0, k1 = k1, k2
    return out


def angular_tables(kh, sg, lg, theta0, us, even):
    """Angular series at complex angle theta0 + i*u for each node u.

    Parameters
    ----------
    kh : float array of harmonic numbers k
    sg, lg : sign and ln|coefficient| per harmonic (lg = -inf marks zeros)
    theta0 : real part of the angle
    us : u nodes, u >= 0
    even : True for a cosine series, False for sine

    Returns
    -------
    (re, im) arrays over nodes: sum_k c_k cos(k z) or sum_k c_k sin(k z),
    using cos(kz) = cos(k theta0) cosh(ku) - i sin(k theta0) sinh(ku) and
    sin(kz) = sin(k theta0) cosh(ku) + i cos(k theta0) sinh(ku).
    """
    ku = kh[:, None] * us[None, :]
    up = lg[:, None] + ku
    B = up.max(axis=0)
    e1 = np.exp(up - B[None, :])
    e2 = np.exp(lg[:, None] - ku - B[None, :])
    chp = 0.5 * (e1 + e2) * sg[:, None]
    shp = 0.5 * (e1 - e2) * sg[:, None]
    ck = np.cos(kh * theta0)
    sk = np.sin(kh * theta0)
    scale = np.exp(B)
    if even:
        re = (ck @ chp) * scale
        im = -(sk @ shp) * scale
    else:
        re = (sk @ chp) * scale
        im = (ck @ shp) * scale
    return re, im


def lu_logdet(a):
    """(sign, ln|det|) of a dense square matrix by partially pivoted LU.

    Log-determinant accumulates pivot magnitudes; the sign tracks row
    swaps and pivot signs.  A hard zero pivot returns sign 0.
    """
    a = a.copy()
    n = a.shape[0]
    sign = 1.0
    logdet = 0.0
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        pval = a[piv, k]
        if pval == 0.0:
            return 0.0, -np.inf
        if piv != k:
            a[[k, piv], k:] = a[[piv, k], k:]
            sign = -sign
        if pval < 0.0:
            sign = -sign
        logdet += np.log(abs(pval))
        if k + 1 < n:
            a[k + 1:, k] /= pval
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return sign, logdet
