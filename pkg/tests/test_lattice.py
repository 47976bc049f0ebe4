import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mahler3 import lattice, lseries, qseries
from mahler3.lattice import QuadForm


def legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def brute_count(Q, k):
    r = math.isqrt(4 * k) + 2
    return sum(1 for m in range(-r, r + 1) for n in range(-r, r + 1) if Q(m, n) == k)


@pytest.mark.parametrize("D", [-3, -4, -8, -20, -24, -40, 5, 8, 12, 13, 24])
def test_kronecker_matches_legendre_on_odd_primes(D):
    for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43):
        expected = 0 if D % p == 0 else legendre(D, p)
        assert lattice.kronecker_chi(D, p) == expected


def test_kronecker_at_two_and_multiplicativity():
    assert lattice.kronecker_chi(-3, 2) == -1 and lattice.kronecker_chi(-7, 2) == 1
    assert lattice.kronecker_chi(-4, 2) == 0
    for D in (-3, -8, 5, 12):
        for m in range(1, 30):
            for n in range(1, 30):
                assert lattice.kronecker_chi(D, m * n) == lattice.kronecker_chi(D, m) * lattice.kronecker_chi(D, n)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(1, 0, 1), (1, 0, 6), (2, 0, 3), (2, 2, 3), (1, 1, 1), (3, 0, 4)]),
       st.integers(1, 300))
def test_rep_count_against_enumeration(form, k):
    Q = QuadForm(*form)
    assert lattice.rep_count(Q, k) == brute_count(Q, k)


def test_rep_count_scaling_relations():
    q1, q2 = QuadForm(1, 0, 6), QuadForm(2, 0, 3)
    for l in range(1, 51):
        assert lattice.rep_count(q2, 2 * l) == lattice.rep_count(q1, l)
    for l in range(1, 101):
        assert lattice.rep_count(q2, 3 * l) == lattice.rep_count(q1, l)
        assert lattice.rep_count(q2, 6 * l) == lattice.rep_count(q2, l)


def test_dirichlet_representation_formula():
    ks = [k for k in range(1, 501) if math.gcd(k, 6) == 1]
    assert all(lattice.convolution_rep_check(k) for k in ks)
    with pytest.raises(ValueError):
        lattice.convolution_rep_check(6)


def test_epstein_sum_square_lattice():
    r = lattice.epstein_sum(QuadForm(1, 0, 1), 2)
    # the quoted 6.0268120396 is a truncation of 6.02681203969...
    assert abs(r.value - 6.0268120396) < 1e-10
    # 4 zeta(2) G = 2 pi^2 G / 3 with Catalan's constant
    catalan = 0.915965594177219015054603514932
    assert abs(r.value - 2 * math.pi ** 2 * catalan / 3) < 1e-9


def test_epstein_precision_unreachable():
    with pytest.raises(lattice.PrecisionUnreachable):
        lattice.epstein_sum(QuadForm(1, 0, 1), 2, target_digits_low=14, K_max=10 ** 5)


@pytest.mark.parametrize("label", ["f", "g", "h", "g48"])
def test_theta_equals_eta_quotient(label):
    theta = lattice.theta_form_coefficients(label, 1000)
    eta = qseries.form_coefficients(lseries.ETA_SPECS[label], 1000)
    assert list(theta) == eta


def test_mixed_sign_theta_is_g_plus_8g4():
    theta = lattice.theta_form_coefficients("g+8g4", 1000)
    g = qseries.form_coefficients(lseries.ETA_SPECS["g"], 1000)
    expected = [g[k] + (8 * g[k // 4] if k % 4 == 0 else 0) for k in range(1001)]
    assert list(theta) == expected


def test_theta_forms_match_known_expansions():
    g24_1 = lattice.theta_form_coefficients("g24_1", 10)
    g24_2 = lattice.theta_form_coefficients("g24_2", 10)
    g40 = lattice.theta_form_coefficients("g40", 13)
    assert g24_1[1:] == (1, 2, -3, 4, -2, -6, -10, 8, 9, -4)
    assert g24_2[1:] == (1, -2, 3, 4, 2, -6, -10, -8, 9, -4)
    assert g40[1:] == (1, -2, 0, 4, 5, 0, 6, -8, 9, -10, -18, 0, -6)


@pytest.mark.parametrize("label", ["f", "g", "h", "g48", "g24_1", "g24_2", "g40"])
def test_hecke_multiplicativity(label):
    a = lattice.theta_form_coefficients(label, 400)
    for k in range(2, 401):
        for l in range(2, 400 // k + 1):
            if math.gcd(k, l) == 1:
                assert a[k] * a[l] == a[k * l], (label, k, l)


def test_theta_rejects_non_integral():
    spec = lattice.ThetaFormSpec((lattice.ThetaTerm((1, 0, 0), QuadForm(1, 0, 1), lattice.Fraction(1, 3)),))
    with pytest.raises(ArithmeticError):
        lattice.theta_coeffs(spec, 10)


def test_quadform_must_be_positive_definite():
    with pytest.raises(ValueError):
        QuadForm(1, 0, -1)
    with pytest.raises(ValueError):
        QuadForm(1, 2, 1)
