"""Angular and radial Mathieu machinery against scipy, series oracles, and
its own exact invariants (normalization, reflection, Wronskian, the ODE)."""

import cmath
import math

import numpy as np
import pytest
import scipy.special

from ellcas.errors import InputError, RangeError
from ellcas.mathieu import (BasisIndex, MathieuExpansion, Parity, RadialKind,
                            angular, angular_negq, build_expansion,
                            expansion_to_json, fresh_coefficient_cache,
                            radial_modified)

EVEN = Parity.EVEN
ODD = Parity.ODD


def _char_ref(parity, m, q):
    if parity is EVEN:
        return scipy.special.mathieu_a(m, q)
    return scipy.special.mathieu_b(m, q)


def _partner(parity, m):
    if m % 2 == 0:
        return parity
    return ODD if parity is EVEN else EVEN


def _indices(m_max):
    out = [BasisIndex(EVEN, m) for m in range(m_max + 1)]
    out += [BasisIndex(ODD, m) for m in range(1, m_max + 1)]
    return out


# --- characteristic values and coefficients -------------------------------


@pytest.mark.parametrize("q", [0.5, 1.0, 5.0, 20.0])
@pytest.mark.parametrize("idx", _indices(10), ids=str)
def test_char_value_matches_scipy(idx, q):
    exp = build_expansion(idx, q)
    ref = _char_ref(idx.parity, idx.m, q)
    assert exp.char_value == pytest.approx(ref, rel=1e-11, abs=1e-11)


def test_char_value_perturbation_series():
    # a_1(q) = 1 + q - q^2/8 + O(q^3), b_1(q) = 1 - q - q^2/8 + O(q^3)
    q = 1e-3
    a1 = build_expansion(BasisIndex(EVEN, 1), q).char_value
    b1 = build_expansion(BasisIndex(ODD, 1), q).char_value
    assert a1 == pytest.approx(1.0 + q - q * q / 8.0, abs=1e-9)
    assert b1 == pytest.approx(1.0 - q - q * q / 8.0, abs=1e-9)
    # at q = 1 the third-order term -q^3/64 brings the series to ~1e-3 of
    # the true value, which scipy puts at -0.11024881699209
    b1_one = build_expansion(BasisIndex(ODD, 1), 1.0).char_value
    assert b1_one == pytest.approx(scipy.special.mathieu_b(1, 1.0), rel=1e-11)
    assert b1_one == pytest.approx(1.0 - 1.0 - 1.0 / 8.0 + 1.0 / 64.0, abs=2e-3)


@pytest.mark.parametrize("parity", [EVEN, ODD])
def test_char_values_increase_with_order(parity):
    q = 12.0
    vals = [build_expansion(BasisIndex(parity, m), q).char_value
            for m in range(parity is ODD, 9)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_expansion_record_shape():
    exp = build_expansion(BasisIndex(EVEN, 4), 7.5)
    assert isinstance(exp, MathieuExpansion)
    assert exp.index.m == 4
    assert exp.q == 7.5
    assert exp.n_terms == len(exp.coeffs)
    assert exp.harmonics[0] == 0
    assert np.all(np.diff(exp.harmonics) == 2)
    # dominant-harmonic sign convention: coefficient of k = m is positive
    k = list(exp.harmonics).index(4)
    assert exp.coeffs[k] > 0.0
    j = expansion_to_json(exp)
    assert j["m"] == 4 and j["parity"] == "even"
    assert j["coeffs"] == [float(c) for c in exp.coeffs]


def test_build_expansion_validation():
    idx = BasisIndex(EVEN, 2)
    with pytest.raises(InputError):
        build_expansion(idx, -1.0)
    with pytest.raises(InputError):
        build_expansion(idx, 0.0)
    with pytest.raises(InputError):
        build_expansion(idx, 1.0, tol=1e-5)  # above the 1e-6 ceiling
    with pytest.raises(InputError):
        build_expansion(idx, 1.0, tol=0.0)
    with pytest.raises(InputError):
        build_expansion("e2", 1.0)


def test_basis_index_validation():
    with pytest.raises(InputError):
        BasisIndex(ODD, 0)
    with pytest.raises(InputError):
        BasisIndex(EVEN, -1)
    with pytest.raises(InputError):
        BasisIndex("even", 1)


# --- angular functions, positive parameter --------------------------------


@pytest.mark.parametrize("q", [1.0, 10.0])
@pytest.mark.parametrize("idx", _indices(8), ids=str)
def test_angular_matches_scipy(idx, q):
    """Values against scipy's ce/se on a theta grid, up to the one overall
    sign that the conventions may disagree on."""
    exp = build_expansion(idx, q)
    thetas = np.arange(0.0, 361.0, 12.5)
    mine = np.array([angular(exp, math.radians(t)).real for t in thetas])
    if idx.parity is EVEN:
        ref = scipy.special.mathieu_cem(idx.m, q, thetas)[0]
    else:
        ref = scipy.special.mathieu_sem(idx.m, q, thetas)[0]
    j = int(np.argmax(np.abs(ref)))
    sigma = math.copysign(1.0, mine[j] * ref[j])
    np.testing.assert_allclose(mine, sigma * ref, rtol=0, atol=2e-12)


@pytest.mark.parametrize("idx", _indices(4), ids=str)
def test_angular_small_q_limit(idx):
    exp = build_expansion(idx, 1e-8)
    for theta in (0.0, 0.4, 1.1, 2.9):
        got = angular(exp, theta).real
        if idx.parity is EVEN:
            ref = math.cos(idx.m * theta) * (1.0 / math.sqrt(2.0)
                                             if idx.m == 0 else 1.0)
        else:
            ref = math.sin(idx.m * theta)
        assert got == pytest.approx(ref, abs=1e-6)


@pytest.mark.parametrize("q", [1.0, 20.0])
@pytest.mark.parametrize("idx", _indices(10), ids=str)
def test_angular_normalization(idx, q):
    """integral of S^2 over a period is pi (trapezoid is spectrally exact
    for the trigonometric polynomial S^2)."""
    exp = build_expansion(idx, q)
    n = 512
    acc = 0.0
    for j in range(n):
        acc += angular(exp, 2.0 * math.pi * j / n).real ** 2
    acc *= 2.0 * math.pi / n
    assert abs(acc - math.pi) / math.pi < 1e-10


def test_angular_periodicity_and_parity():
    exp = build_expansion(BasisIndex(EVEN, 3), 4.0)
    for theta in (0.3, 1.7):
        assert angular(exp, theta + 2.0 * math.pi).real == \
            pytest.approx(angular(exp, theta).real, rel=1e-12)
        # cosine-type: even under theta -> -theta
        assert angular(exp, -theta).real == \
            pytest.approx(angular(exp, theta).real, rel=1e-12)
    expo = build_expansion(BasisIndex(ODD, 3), 4.0)
    for theta in (0.3, 1.7):
        assert angular(expo, -theta).real == \
            pytest.approx(-angular(expo, theta).real, rel=1e-12)


def test_angular_complex_schwarz_symmetry():
    exp = build_expansion(BasisIndex(EVEN, 2), 6.0)
    z = complex(0.8, 1.3)
    assert angular(exp, z.conjugate()) == \
        pytest.approx(angular(exp, z).conjugate(), rel=1e-13)


def test_angular_complex_argument_matches_direct_sum_where_safe():
    """At moderate imaginary part the naive sum over the public trimmed
    coefficients is still accurate; the stabilized evaluator must agree."""
    exp = build_expansion(BasisIndex(EVEN, 0), 2.25)
    z = complex(1.1, 0.5)
    got = angular(exp, z)
    ref = 0.0 + 0.0j
    for k, c in zip(exp.harmonics, exp.coeffs):
        ref += c * cmath.cos(k * z)
    assert abs(got - ref) / abs(ref) < 1e-10


@pytest.mark.parametrize("parity,m,q,z", [
    (EVEN, 0, 2.25, complex(1.1, 2.1)),
    (EVEN, 3, 6.0, complex(0.4, 1.75)),
    (ODD, 2, 1.5, complex(2.0, 2.4)),
])
def test_angular_complex_argument_satisfies_ode(parity, m, q, z):
    """Deep in the complex plane (where the naive trimmed sum has lost all
    accuracy to tail amplification) the evaluator must still satisfy
    d^2S/du^2 = (a - 2q cos 2z) S pointwise."""
    exp = build_expansion(BasisIndex(parity, m), q)
    h = 1e-3
    vals = [angular(exp, z + complex(0.0, j * h)) for j in (-2, -1, 0, 1, 2)]
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) \
        / (12.0 * h * h)
    rhs = (exp.char_value - 2.0 * q * cmath.cos(2.0 * z)) * vals[2]
    assert abs(d2 - rhs) / max(abs(rhs), abs(d2)) < 1e-6


def test_angular_beyond_cap_raises():
    exp = build_expansion(BasisIndex(EVEN, 1), 1e-6)
    with pytest.raises(RangeError):
        angular(exp, complex(0.5, 1e4))


def test_angular_evaluation_up_to_cap():
    # evaluation stays finite and stable right up to the certified cap
    exp = build_expansion(BasisIndex(EVEN, 2), 3.0)
    u = exp.u_cap * 0.999
    v = angular(exp, complex(0.7, u))
    assert cmath.isfinite(v)
    assert abs(v) > 1.0  # grown, not underflowed


# --- negative-parameter angular functions ---------------------------------


_NEGQ_SAMPLES = [
    (EVEN, 0, 0.75, 0.31), (EVEN, 1, 2.0, 1.9), (EVEN, 2, 9.0, 0.05),
    (EVEN, 3, 0.2, 2.6), (EVEN, 5, 14.0, 1.2), (EVEN, 8, 5.5, 0.8),
    (ODD, 1, 0.6, 2.2), (ODD, 2, 3.3, 0.45), (ODD, 3, 18.0, 1.55),
    (ODD, 4, 1.1, 0.9), (ODD, 6, 7.7, 2.95), (ODD, 9, 2.4, 0.15),
]


@pytest.mark.parametrize("parity,m,s,theta", _NEGQ_SAMPLES,
                         ids=lambda v: str(v))
def test_negq_reflection_identity(parity, m, s, theta):
    """S(theta; -s) equals the partner function at +s evaluated at
    pi/2 - theta, up to a fixed sign; applying the map twice returns the
    original value (involution)."""
    idx = BasisIndex(parity, m)
    partner = build_expansion(BasisIndex(_partner(parity, m), m), s)
    got = angular_negq(idx, s, theta).real
    ref = angular(partner, 0.5 * math.pi - theta).real
    assert abs(abs(got) - abs(ref)) < 1e-12 * max(abs(ref), 1e-3)
    # sign is a constant of the pair, not of theta
    got2 = angular_negq(idx, s, theta + 0.37).real
    ref2 = angular(partner, 0.5 * math.pi - theta - 0.37).real
    if abs(ref) > 1e-6 and abs(ref2) > 1e-6:
        assert math.copysign(1.0, got * ref) == \
            math.copysign(1.0, got2 * ref2)


def test_negq_involution_roundtrip():
    """Reflecting the reflected function lands back on the +q function."""
    for parity, m, s, theta in _NEGQ_SAMPLES[:6]:
        idx = BasisIndex(parity, m)
        pidx = BasisIndex(_partner(parity, m), m)
        orig = angular(build_expansion(idx, s), theta).real
        via = angular_negq(pidx, s, 0.5 * math.pi - theta).real
        assert abs(abs(via) - abs(orig)) < 1e-12 * max(abs(orig), 1e-3)


def test_negq_normalization():
    # the reflection preserves the integral of S^2
    for parity, m, s in ((EVEN, 0, 2.0), (ODD, 3, 11.0), (EVEN, 4, 0.7)):
        idx = BasisIndex(parity, m)
        n = 512
        acc = 0.0
        for j in range(n):
            acc += angular_negq(idx, s, 2.0 * math.pi * j / n).real ** 2
        acc *= 2.0 * math.pi / n
        assert abs(acc - math.pi) / math.pi < 1e-10


def test_negq_schwarz_symmetry():
    idx = BasisIndex(ODD, 2)
    z = complex(1.2, 0.9)
    a = angular_negq(idx, 4.0, z)
    b = angular_negq(idx, 4.0, z.conjugate())
    assert b == pytest.approx(a.conjugate(), rel=1e-13)


def test_negq_validation():
    with pytest.raises(InputError):
        angular_negq(BasisIndex(EVEN, 1), -2.0, 0.3)
    with pytest.raises(InputError):
        angular_negq(BasisIndex(EVEN, 1), 0.0, 0.3)


def test_fresh_cache_reproduces_global_cache_bits():
    idx = BasisIndex(EVEN, 3)
    z = complex(0.9, 1.4)
    a = angular_negq(idx, 6.25, z)
    with fresh_coefficient_cache():
        b = angular_negq(idx, 6.25, z)
    assert a == b  # bitwise


# --- modified radial functions ---------------------------------------------


@pytest.mark.parametrize("parity,m", [(EVEN, 0), (EVEN, 1), (EVEN, 3),
                                      (ODD, 1), (ODD, 2), (ODD, 4)])
@pytest.mark.parametrize("s", [0.5, 4.0, 25.0])
def test_radial_wronskian(parity, m, s):
    """I- and K-kind cross products: v_I v_K' - v_I' v_K = -1 exactly in
    the cylindrical normalization, at every mu."""
    idx = BasisIndex(parity, m)
    for mu in (0.2, 1.0, 2.5):
        vi, di = radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, s, mu)
        vk, dk = radial_modified(RadialKind.OUTGOING_MODIFIED, idx, s, mu)
        assert abs(vi * dk - di * vk + 1.0) < 1e-10


@pytest.mark.parametrize("parity,m,s,mu", [
    (EVEN, 0, 3.0, 0.6), (EVEN, 2, 1.2, 1.1), (EVEN, 5, 8.0, 0.35),
    (ODD, 1, 0.8, 0.9), (ODD, 3, 15.0, 0.5), (ODD, 6, 5.0, 1.4),
])
@pytest.mark.parametrize("kind", [RadialKind.FIRST_KIND_MODIFIED,
                                  RadialKind.OUTGOING_MODIFIED])
def test_radial_satisfies_modified_equation(kind, parity, m, s, mu):
    """R'' = (a + 2 s cosh 2mu) R, with a the characteristic value of the
    negative-parameter problem; five-point finite differences."""
    idx = BasisIndex(parity, m)
    a_char = build_expansion(BasisIndex(_partner(parity, m), m), s).char_value
    h = 1e-3
    vals = [radial_modified(kind, idx, s, mu + j * h)[0] for j in (-2, -1, 0, 1, 2)]
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) \
        / (12.0 * h * h)
    rhs = (a_char + 2.0 * s * math.cosh(2.0 * mu)) * vals[2]
    scale = max(abs(rhs), abs(d2), 1e-30)
    assert abs(d2 - rhs) / scale < 1e-6


@pytest.mark.parametrize("parity,m,s,mu", [
    (EVEN, 1, 2.0, 0.7), (ODD, 2, 6.0, 1.2), (EVEN, 4, 0.9, 0.4),
])
@pytest.mark.parametrize("kind", [RadialKind.FIRST_KIND_MODIFIED,
                                  RadialKind.OUTGOING_MODIFIED])
def test_radial_derivative_consistent(kind, parity, m, s, mu):
    idx = BasisIndex(parity, m)
    h = 1e-4
    vm2 = radial_modified(kind, idx, s, mu - 2 * h)[0]
    vm1 = radial_modified(kind, idx, s, mu - h)[0]
    vp1 = radial_modified(kind, idx, s, mu + h)[0]
    vp2 = radial_modified(kind, idx, s, mu + 2 * h)[0]
    fd = (vm2 - 8 * vm1 + 8 * vp1 - vp2) / (12.0 * h)
    dv = radial_modified(kind, idx, s, mu)[1]
    assert dv == pytest.approx(fd, rel=5e-9)


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_radial_cylindrical_normalization_at_large_mu(m):
    """At large mu the functions converge to cylindrical Bessel functions of
    the combined argument sqrt(s) e^mu, with a 1/v correction."""
    s, mu = 4.0, 5.5
    v2 = math.sqrt(s) * math.exp(mu)
    for parity in (EVEN, ODD):
        if m == 0 and parity is ODD:
            continue
        idx = BasisIndex(parity, m)
        vi, _ = radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, s, mu)
        vk, _ = radial_modified(RadialKind.OUTGOING_MODIFIED, idx, s, mu)
        ref_i = scipy.special.ive(m, v2) * math.exp(v2)
        ref_k = scipy.special.kve(m, v2) * math.exp(-v2)
        assert abs(vi / ref_i - 1.0) < 5.0 / v2
        assert abs(vk / ref_k - 1.0) < 5.0 / v2


def test_radial_outgoing_ratio_near_asymptote():
    """Ke_0(mu=4, s=1) against K_0(e^4): agreement is first-order in
    1/(2 v2) ~ 1e-2 at this depth, not exact."""
    idx = BasisIndex(EVEN, 0)
    vk, _ = radial_modified(RadialKind.OUTGOING_MODIFIED, idx, 1.0, 4.0)
    v2 = math.exp(4.0)
    ref = scipy.special.kve(0, v2) * math.exp(-v2)
    assert abs(vk / ref - 1.0) < 1.0 / v2
    assert abs(vk / ref - 1.0) > 1e-5  # genuinely a 1/v correction, not noise


def test_radial_exact_zeros_at_axis():
    # I-kind: odd functions vanish at mu = 0, even ones have zero slope
    vi, di = radial_modified(RadialKind.FIRST_KIND_MODIFIED,
                             BasisIndex(ODD, 2), 3.0, 0.0)
    assert vi == 0.0 and di != 0.0
    vi, di = radial_modified(RadialKind.FIRST_KIND_MODIFIED,
                             BasisIndex(EVEN, 2), 3.0, 0.0)
    assert di == 0.0 and vi != 0.0
    # K-kind has no such symmetry: both finite and nonzero
    vk, dk = radial_modified(RadialKind.OUTGOING_MODIFIED,
                             BasisIndex(EVEN, 0), 3.0, 0.0)
    assert vk != 0.0 and dk != 0.0


def test_radial_positivity_and_growth():
    idx = BasisIndex(EVEN, 1)
    vals_i = [radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, 2.0, mu)[0]
              for mu in (0.5, 1.0, 2.0, 3.0)]
    vals_k = [radial_modified(RadialKind.OUTGOING_MODIFIED, idx, 2.0, mu)[0]
              for mu in (0.5, 1.0, 2.0, 3.0)]
    assert all(v > 0 for v in vals_i)
    assert all(v > 0 for v in vals_k)
    assert all(b > a for a, b in zip(vals_i, vals_i[1:]))
    assert all(b < a for a, b in zip(vals_k, vals_k[1:]))


def test_radial_overflow_raises():
    with pytest.raises(RangeError):
        radial_modified(RadialKind.FIRST_KIND_MODIFIED,
                        BasisIndex(EVEN, 0), 100.0, 7.0)


def test_radial_validation():
    idx = BasisIndex(EVEN, 1)
    with pytest.raises(InputError):
        radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, -1.0, 0.5)
    with pytest.raises(InputError):
        radial_modified(RadialKind.FIRST_KIND_MODIFIED, idx, 2.0, -0.1)
    with pytest.raises(InputError):
        radial_modified("I", idx, 2.0, 0.5)
