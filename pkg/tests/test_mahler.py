import time
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from mpmath import mp, mpf

from mahler3 import mahler, qseries
from mahler3.mahler import PolyInstance
from mahler3.numkernel import PrecisionContext

CTX = PrecisionContext(30)


def close(a, b, digits):
    with mp.workdps(digits + 10):
        return abs(a - b) <= mpf(10) ** -digits * max(1, abs(b))


def constant_term_measure(k, c, terms):
    """m(P - k) = log|k| - sum c_n / (n k^n) where c_n is the constant term of P^n."""
    with mp.workdps(50):
        kv = mpf(k)
        return mp.log(abs(kv)) - mp.fsum(mpf(c(n)) / (n * kv ** n) for n in range(1, terms))


# constant terms of the powers of the three Laurent polynomials
C2 = lambda n: comb(2 * n, n) ** 3                               # (8 cos cos cos)^2
C3 = lambda n: comb(2 * n, n) ** 2 * comb(3 * n, n)              # 16 cos^2 cos^2 (1+z)^3/z^2
C4 = lambda n: factorial(4 * n) // factorial(n) ** 4             # (x^4+y^4+z^4+1)/(xyz)


@pytest.mark.parametrize("family,k,c", [
    (2, 256, C2), (2, 1024, C2), (2, -128, C2),
    (3, 432, C3), (3, -216, C3), (3, 1458, C3),
    (4, 1024, C4), (4, -1024, C4), (4, 2 ** 12, C4),
])
def test_f_against_constant_term_series(family, k, c):
    ratio = {2: 64, 3: 108, 4: 256}[family] / abs(k)
    terms = int(40 / -np.log10(ratio)) + 5
    oracle = constant_term_measure(k, c, terms)
    assert close(mahler.f_at_k(family, k, CTX).value, oracle, 30)


@pytest.mark.parametrize("family,k", [(2, 64), (2, 100), (3, 128), (3, 500), (4, 256), (4, 3000)])
def test_gseries_and_hypergeometric_routes_agree(family, k):
    nome = qseries.invert_s(family, k, CTX)
    g = mahler.f_gseries(family, nome, CTX).value
    h = mahler.f_hyper(family, k, CTX).value
    digits = 8 if k == {2: 64, 3: 128, 4: 256}[family] else 30
    assert close(g, h, digits)
    assert "gseries" in mahler.f_at_k(family, k, CTX).route


def test_gseries_only_region():
    # 108 <= k < 128 is reachable only through the G-series
    r = mahler.f_at_k(3, 120, CTX)
    assert r.route == "gseries"
    with pytest.raises(mahler.DomainError):
        mahler.f_hyper(3, 120, CTX)


def test_f3_at_zero():
    assert mahler.f_at_k(3, 0, CTX).value == 0


def test_unroutable_arguments():
    with pytest.raises(mahler.UnroutableError):
        mahler.f_at_k(2, 10, CTX)
    for z in (40, -2, 4):
        with pytest.raises(mahler.UnroutableError):
            mahler.qk_mahler(z, CTX)


def _qk_constant_terms(n_max):
    """Constant terms of P^n, P = sum of x, y, z, xy, yz, xyz and inverses, by exact convolution."""
    R = n_max
    size = 2 * R + 1
    cur = np.zeros((size, size, size), dtype=object)
    cur[R, R, R] = 1
    shifts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1), (1, 1, 1)]
    shifts += [tuple(-s for s in v) for v in shifts]
    out = [1]
    for _ in range(n_max):
        nxt = np.zeros_like(cur)
        for a, b, c in shifts:
            nxt[max(a, 0):size + min(a, 0), max(b, 0):size + min(b, 0), max(c, 0):size + min(c, 0)] += \
                cur[max(-a, 0):size + min(-a, 0), max(-b, 0):size + min(-b, 0), max(-c, 0):size + min(-c, 0)]
        cur = nxt
        out.append(cur[R, R, R])
    return out


def test_qk_polynomial_constant_terms():
    assert _qk_constant_terms(5) == [1, 0, 12, 48, 540, 4320]


@pytest.mark.parametrize("z", [200, -200, -60])
def test_qk_against_constant_term_series(z):
    c = _qk_constant_terms(30)
    k = z - 4
    oracle = constant_term_measure(k, lambda n: c[n], 31)
    bound = (12 / abs(k)) ** 31
    assert abs(mahler.qk_mahler(z, CTX).value - oracle) < max(bound, 1e-28) * 10


def test_smyth_quadrature():
    # m(1 + x + y) = 3 sqrt(3) / (4 pi) L(chi_-3, 2)
    with mp.workdps(45):
        l = (mp.zeta(2, mpf(1) / 3) - mp.zeta(2, mpf(2) / 3)) / 9
        oracle = 3 * mp.sqrt(3) / (4 * mp.pi) * l
    assert close(mahler.smyth_jensen(CTX).value, oracle, 30)


def test_f2_approaches_log_s2_near_cusp():
    with mp.workdps(45):
        q = mpf("1e-10")
    r = mahler.f_gseries(2, q, CTX)
    with mp.workdps(45):
        assert abs(r.value - mp.log(r.s_value)) < mpf("1e-8")


def test_gseries_domain_checks():
    with pytest.raises(mahler.DomainError):
        mahler.f_gseries(2, qseries.CMPoint(Fraction(1, 2), 1), CTX)
    with pytest.raises(mahler.DomainError):
        mahler.f_gseries(4, qseries.CMPoint(0, Fraction(1, 3)), CTX)


# quasi-Monte Carlo on the torus: independent of every series route

@pytest.mark.slow
def test_integral_smyth_three_digits():
    t0 = time.time()
    r = mahler.mahler_integral(PolyInstance("smyth"), samples=10 ** 7, seed=0)
    assert abs(r.value - mahler.smyth_jensen(CTX).value) < 5e-4
    assert time.time() - t0 < 300


@pytest.mark.slow
def test_integral_f2_two_digits():
    r = mahler.mahler_integral(PolyInstance("f2", 64.0), samples=10 ** 7, seed=0)
    assert abs(r.value - mahler.f_at_k(2, 64, CTX).value) < 5e-3


@pytest.mark.slow
def test_integral_root_choice_invariance():
    a = mahler.mahler_integral(PolyInstance("f2", 64.0, 1), samples=10 ** 6, seed=1)
    b = mahler.mahler_integral(PolyInstance("f2", 64.0, -1), samples=10 ** 6, seed=1)
    assert abs(a.value - b.value) < 5e-3


@pytest.mark.slow
def test_integral_qk_against_exact_route():
    r = mahler.mahler_integral(PolyInstance("qk", -36.0), samples=10 ** 6, seed=0)
    assert abs(r.value - mahler.qk_mahler(-32, CTX).value) < 5e-3


def test_integral_is_seed_deterministic():
    a = mahler.mahler_integral(PolyInstance("smyth"), samples=10 ** 4, seed=3)
    b = mahler.mahler_integral(PolyInstance("smyth"), samples=10 ** 4, seed=3)
    assert a.value == b.value
    with pytest.raises(ValueError):
        mahler.mahler_integral(PolyInstance("smyth"), samples=100)
