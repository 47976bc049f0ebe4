from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from mahler3 import qseries as qs
from mahler3.numkernel import DomainError, PrecisionContext
from mahler3.qseries import CMPoint, EtaQuotientSpec, IntSeries

CTX = PrecisionContext(30)


def partition_inverse(M):
    # 1/prod(1-q^n) = partition generating function, by direct counting
    p = [1] + [0] * M
    for part in range(1, M + 1):
        for n in range(part, M + 1):
            p[n] += p[n - part]
    return p


def close(a, b, digits):
    with mp.workdps(digits + 10):
        return abs(a - b) <= mpf(10) ** -digits * max(1, abs(b))


def test_eta_coefficients_are_pentagonal():
    c = qs.eta_coeffs(40).coefficients
    assert c[:13] == (1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1)
    assert (qs.eta_coeffs(200) * IntSeries(partition_inverse(200))) == IntSeries.one(200)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=12), st.integers(-4, 6))
def test_power_matches_repeated_product(tail, e):
    s = IntSeries([1] + tail)
    M = len(tail)
    expected = IntSeries.one(M)
    base = s if e >= 0 else s.inverse()
    for _ in range(abs(e)):
        expected = expected * base
    assert s ** e == expected


@pytest.mark.parametrize("label,factors", [
    ("f", ((1, 2), (2, 1), (4, 1), (8, 2))),
    ("g", ((2, 3), (6, 3))),
    ("h", ((4, 6),)),
    ("g48", ((4, 9), (12, 9), (2, -3), (6, -3), (8, -3), (24, -3))),
])
def test_eta_quotient_against_brute_force(label, factors):
    spec = EtaQuotientSpec(factors)
    series, lead = qs.eta_quotient_coeffs(spec, 60)
    assert lead == 1 and spec.weight == 3
    assert series == qs.brute_force_product(spec, 60)


def test_known_expansions():
    g48 = qs.form_coefficients(EtaQuotientSpec(((4, 9), (12, 9), (2, -3), (6, -3), (8, -3), (24, -3))), 21)
    g = qs.form_coefficients(EtaQuotientSpec(((2, 3), (6, 3))), 21)
    h = qs.form_coefficients(EtaQuotientSpec(((4, 6),)), 9)
    assert [g48[k] for k in (1, 3, 7, 9, 13, 19, 21)] == [1, 3, -2, 9, -22, -26, -6]
    assert [g[k] for k in (1, 3, 7, 9, 13, 19, 21)] == [1, -3, 2, 9, -22, 26, -6]
    assert h[1:] == [1, 0, 0, 0, -6, 0, 0, 0, 9]


def test_weber_singular_values():
    two = mpf(2)
    with mp.workdps(45):
        checks = [
            (qs.weber_f(CMPoint.sqrt_neg(1), CTX), two ** (mpf(1) / 4)),
            (qs.weber_f(CMPoint.sqrt_neg(3), CTX), two ** (mpf(1) / 3)),
            (qs.weber_f1(CMPoint.sqrt_neg(2), CTX), two ** (mpf(1) / 4)),
            (qs.weber_f1(CMPoint.sqrt_neg(4), CTX), mpf(8) ** (mpf(1) / 8)),
            (qs.weber_f1(CMPoint.sqrt_neg(6), CTX) ** 6, 4 + 2 * mp.sqrt(2)),
            (qs.weber_f1(CMPoint.sqrt_neg(8), CTX) ** 8, 8 + 8 * mp.sqrt(2)),
            (mp.sqrt(2) * qs.weber_f1(CMPoint.sqrt_neg(10), CTX) ** 2, 1 + mp.sqrt(5)),
            (qs.weber_f1(CMPoint.sqrt_neg(18), CTX) ** 3, two ** (mpf(3) / 4) * (mp.sqrt(2) + mp.sqrt(3))),
        ]
    for value, expected in checks:
        assert close(value, expected, 30)


def test_weber_product_relation():
    # f1(2 tau) = f(tau) f1(tau)
    tau = CMPoint.sqrt_neg(3)
    with mp.workdps(45):
        lhs = qs.weber_f1(tau.scaled(2), CTX)
        rhs = qs.weber_f(tau, CTX) * qs.weber_f1(tau, CTX)
    assert close(lhs, rhs, 30)


def test_eta_two_routes_agree():
    tau = CMPoint.sqrt_neg(5, 3)
    assert close(qs.eta_value(tau, CTX), qs.eta_value_logsum(tau, CTX), 30)


def test_eta_modular_inversion():
    # eta(i/t) = sqrt(t) eta(i t)
    t2 = Fraction(7, 5)
    a = qs.eta_value(CMPoint(0, 1 / t2), CTX)
    b = qs.eta_value(CMPoint(0, t2), CTX)
    with mp.workdps(45):
        assert close(a, mp.sqrt(mp.sqrt(mpf(7) / 5)) * b, 30)


def test_s2_equals_weber_f_power():
    tau = CMPoint.sqrt_neg(3, 2)
    with mp.workdps(45):
        assert close(qs.s2(tau.nome(CTX), CTX), qs.weber_f(tau.scaled(2), CTX) ** 24, 30)


def test_g_series_identity_for_negative_nome():
    for t in (1, 2, 4):
        with mp.workdps(45):
            q = mp.exp(-mp.pi * t)
            lhs = qs.g_series(-q, CTX)
            rhs = 9 * qs.g_series(q * q, CTX) - 4 * qs.g_series(q ** 4, CTX) - qs.g_series(q, CTX)
        assert close(lhs, rhs, 30)


@pytest.mark.parametrize("level,k", [(2, 64), (2, 300), (3, 108), (3, 1458), (4, 256), (4, 5000)])
def test_invert_s_round_trip(level, k):
    nome = qs.invert_s(level, k, CTX)
    assert close(qs.s_value(level, nome, CTX), mpf(k), 30)
    assert nome.magnitude <= qs.q_boundary(level, CTX) * (1 + mpf(10) ** -25)


def test_invert_s_below_boundary_fails():
    with pytest.raises(qs.BracketError):
        qs.invert_s(2, 50, CTX)


def test_nome_domain():
    with pytest.raises(DomainError):
        qs.Nome(mpf(1))
    with pytest.raises(DomainError):
        qs.s3(mpf("-0.1"), CTX)


def test_half_integer_real_part_gives_negative_nome():
    nome = CMPoint(Fraction(1, 2), Fraction(1)).nome(CTX)
    assert nome.sign == -1
    with mp.workdps(45):
        assert close(nome.magnitude, mp.exp(-2 * mp.pi), 30)
