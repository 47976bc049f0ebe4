"""Binary quadratic forms, lattice sums and CM theta-series coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numkernel import PrecisionUnreachable
from .qseries import IntSeries


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.disc >= 0:
            raise ValueError(f"{self} is not positive definite")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, m, n):
        return self.a * m * m + self.b * m * n + self.c * n * n

    def swapped(self) -> "QuadForm":
        return QuadForm(self.c, self.b, self.a)

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


@dataclass(frozen=True)
class ThetaTerm:
    numerator: tuple[int, int, int]  # alpha m^2 + beta mn + gamma n^2
    form: QuadForm
    scale: Fraction = Fraction(1, 2)


@dataclass(frozen=True)
class ThetaFormSpec:
    """sum over terms of scale * num(m, n) q^{form(m, n)}, over all (m, n)."""

    terms: tuple[ThetaTerm, ...]


def _spec(*terms) -> ThetaFormSpec:
    return ThetaFormSpec(tuple(ThetaTerm(num, QuadForm(*den)) for num, den in terms))


THETA_SPECS = {
    "f": _spec(((1, 0, -2), (1, 0, 2))),
    "g": _spec(((1, 0, -3), (1, 0, 3))),
    "h": _spec(((1, 0, -4), (1, 0, 4))),
    "g48": _spec(((1, 0, -12), (1, 0, 12)), ((3, 0, -4), (3, 0, 4))),
    "g+8g4": _spec(((1, 0, -12), (1, 0, 12)), ((-3, 0, 4), (3, 0, 4))),
    "g24_1": _spec(((1, 0, -6), (1, 0, 6)), ((2, 0, -3), (2, 0, 3))),
    "g24_2": _spec(((1, 0, -6), (1, 0, 6)), ((3, 0, -2), (3, 0, 2))),
    "g40": _spec(((1, 0, -10), (1, 0, 10)), ((5, 0, -2), (5, 0, 2))),
}


# ---------------------------------------------------------------------------
# characters and divisor sums


def kronecker_chi(D: int, n: int) -> int:
    """Kronecker symbol (D/n)."""
    if D == 0:
        raise ValueError("D must be nonzero")
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n) for odd n > 0
    a = D % n if n > 1 else 0
    if n == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def divisors(k: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def sigma(k: int, power: int = 1) -> int:
    return sum(d ** power for d in divisors(k))


# ---------------------------------------------------------------------------
# representation counts


def rep_count(Q: QuadForm, k: int) -> int:
    """#{(m, n) in Z^2 : Q(m, n) = k}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a, b, c = Q.a, Q.b, Q.c
    delta = -Q.disc
    nmax = math.isqrt(4 * a * k // delta) + 1
    count = 0
    for n in range(-nmax, nmax + 1):
        # a m^2 + b n m + (c n^2 - k) = 0
        dd = (b * n) ** 2 - 4 * a * (c * n * n - k)
        if dd < 0:
            continue
        r = math.isqrt(dd)
        if r * r != dd:
            continue
        for num in {-b * n + r, -b * n - r}:
            if num % (2 * a) == 0:
                count += 1
    return count


def dirichlet_rep_formula(k: int) -> int:
    """(1 - chi_{-3}(k)) sum_{l | k} chi_{-24}(l)."""
    return (1 - kronecker_chi(-3, k)) * sum(kronecker_chi(-24, l) for l in divisors(k))


def convolution_rep_check(k: int) -> bool:
    if math.gcd(k, 6) != 1:
        raise ValueError("k must be coprime to 6")
    return rep_count(QuadForm(2, 0, 3), k) == dirichlet_rep_formula(k)


# ---------------------------------------------------------------------------
# lattice enumeration


def _rows(Q: QuadForm, K: float):
    """Yield (n, m-array, Q-values) for all lattice points with 0 < Q <= K."""
    a, b, c = Q.a, Q.b, Q.c
    delta = -Q.disc
    nmax = int(math.isqrt(int(4 * a * K // delta))) + 1
    for n in range(-nmax, nmax + 1):
        # a m^2 + b n m + c n^2 <= K
        dd = (b * n) ** 2 - 4 * a * (c * n * n - K)
        if dd < 0:
            continue
        r = math.sqrt(dd)
        lo = math.ceil((-b * n - r) / (2 * a))
        hi = math.floor((-b * n + r) / (2 * a))
        if hi < lo:
            continue
        m = np.arange(lo, hi + 1, dtype=np.int64)
        vals = a * m * m + b * n * m + c * n * n
        keep = (vals <= K) & (vals > 0)
        yield n, m[keep], vals[keep]


def _lattice_moments(Q: QuadForm, K: float, t: float, numerator=None):
    """(sum num/Q^t over 0 < Q <= K, sum num, point count)."""
    total = 0.0
    numsum = 0.0
    count = 0
    for n, m, vals in _rows(Q, K):
        if numerator is None:
            w = np.ones_like(vals, dtype=np.float64)
        else:
            al, be, ga = numerator
            w = (al * m * m + be * n * m + ga * n * n).astype(np.float64)
        v = vals.astype(np.float64)
        total += float(np.sum(w * v ** (-t)))
        numsum += float(np.sum(w))
        count += len(vals)
    return total, numsum, count


def _richardson(values, rate):
    """Eliminate a leading c*K^-rate error from values at K, 2K, 4K."""
    r = 2.0 ** rate
    first = [(r * values[i + 1] - values[i]) / (r - 1) for i in range(len(values) - 1)]
    return first


@dataclass(frozen=True)
class LatticeSum:
    value: float
    error_estimate: float
    K: int


def epstein_sum(Q: QuadForm, t: float, target_digits_low: int = 8, K: int = 10 ** 4,
                K_max: int = 2 * 10 ** 6) -> LatticeSum:
    """S(a,b,c;t) = sum' Q(m,n)^-t by shell summation with a tail correction.

    Each partial sum over Q <= K gets the tail -N(K) K^-t + t A K^(1-t)/(t-1),
    A = 2 pi / sqrt(-disc) the point density; the corrected sums at K, 2K, 4K
    are then Richardson-combined against the residual K^-t term.
    """
    if t < 2:
        raise ValueError("epstein_sum supports t >= 2")
    density = 2 * math.pi / math.sqrt(-Q.disc)
    tol = 10.0 ** (-target_digits_low)
    while True:
        vals = []
        for Kj in (K, 2 * K, 4 * K):
            s, _, count = _lattice_moments(Q, Kj, t)
            tail = -(count + 1) * Kj ** (-t) + t * density * Kj ** (1 - t) / (t - 1)
            vals.append(s + tail)
        extrap = _richardson(vals, t)
        value = extrap[-1]
        err = max(abs(extrap[-1] - extrap[0]), abs(vals[-1] - vals[-2]) * 2.0 ** (-t))
        if err <= tol * max(1.0, abs(value)):
            return LatticeSum(value, err, 4 * K)
        if 8 * K > K_max:
            raise PrecisionUnreachable(
                f"epstein_sum{Q} at t={t}: error {err:.2e} exceeds {tol:.0e} with K={4 * K}")
        K *= 2


def signed_lattice_sum(spec: ThetaFormSpec, s: float, target_digits_low: int = 6,
                       K: int = 10 ** 4, K_max: int = 2 * 10 ** 6) -> LatticeSum:
    """sum_terms scale * sum' num(m,n)/form(m,n)^s, the Dirichlet series of the theta spec."""
    if s < 3:
        raise ValueError("signed_lattice_sum supports s >= 3")
    tol = 10.0 ** (-target_digits_low)
    while True:
        vals = []
        for Kj in (K, 2 * K, 4 * K):
            tot = 0.0
            for term in spec.terms:
                part, numsum, _ = _lattice_moments(term.form, Kj, s, term.numerator)
                # boundary correction; the smooth tail vanishes (numerators average to 0)
                tot += float(term.scale) * (part - numsum * Kj ** (-s))
            vals.append(tot)
        extrap = _richardson(vals, s - 1)
        value = extrap[-1]
        err = max(abs(extrap[-1] - extrap[0]), abs(vals[-1] - vals[-2]))
        if err <= tol * max(1.0, abs(value)):
            return LatticeSum(value, err, 4 * K)
        if 8 * K > K_max:
            raise PrecisionUnreachable(
                f"signed_lattice_sum at s={s}: error {err:.2e} exceeds {tol:.0e} with K={4 * K}")
        K *= 2


def theta_coeffs(spec: ThetaFormSpec, M: int) -> IntSeries:
    """Exact a(0..M) of sum scale * num(m,n) q^{form(m,n)}."""
    if M < 1:
        raise ValueError("M must be >= 1")
    acc = [Fraction(0)] * (M + 1)
    for term in spec.terms:
        al, be, ga = term.numerator
        raw = np.zeros(M + 1, dtype=np.int64)
        for n, m, vals in _rows(term.form, M):
            np.add.at(raw, vals, al * m * m + be * n * m + ga * n * n)
        for k in np.nonzero(raw)[0]:
            acc[int(k)] += term.scale * int(raw[k])
    out = []
    for k, x in enumerate(acc):
        if x.denominator != 1:
            raise ArithmeticError(f"non-integral theta coefficient a({k}) = {x}")
        out.append(int(x))
    return IntSeries(out)


@lru_cache(maxsize=64)
def theta_form_coefficients(label: str, M: int) -> tuple[int, ...]:
    """(0, a(1), ..., a(M)) for a named theta spec."""
    return theta_coeffs(THETA_SPECS[label], M).coefficients
