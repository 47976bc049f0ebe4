"""Arbitrary-precision kernel shared by every other module.

All real values are ``mpmath.mpf`` numbers computed inside
``mp.workprec(ctx.working_bits)``.  Public functions take a
:class:`PrecisionContext` (or a plain digit count) and never touch the
global mpmath precision outside that block.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

GUARD_BITS_FLOOR = 32
E1_SERIES_SWITCH = 4


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionUnreachable(RuntimeError):
    """A truncation or extrapolation cannot meet the requested accuracy."""


def bits_for_digits(digits: int) -> int:
    return math.ceil(digits * math.log2(10))


@dataclass(frozen=True)
class PrecisionContext:
    target_digits: int
    guard_bits: int = GUARD_BITS_FLOOR
    working_bits: int = field(default=0)

    def __post_init__(self):
        if self.target_digits < 1:
            raise ValueError("target_digits must be positive")
        if self.guard_bits < GUARD_BITS_FLOOR:
            raise ValueError(f"guard_bits must be >= {GUARD_BITS_FLOOR}")
        needed = bits_for_digits(self.target_digits) + self.guard_bits
        if self.working_bits == 0:
            object.__setattr__(self, "working_bits", needed)
        elif self.working_bits < needed:
            raise ValueError(f"working_bits {self.working_bits} < required {needed}")

    def workprec(self):
        return mp.workprec(self.working_bits)

    def doubled(self) -> "PrecisionContext":
        """Same target, twice the working precision (self-consistency runs)."""
        return PrecisionContext(self.target_digits, self.guard_bits, 2 * self.working_bits)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return PrecisionContext(digits, self.guard_bits)

    @property
    def eps(self) -> mpf:
        return mpf(2) ** (-self.working_bits)


def as_context(ctx) -> PrecisionContext:
    if isinstance(ctx, PrecisionContext):
        return ctx
    return PrecisionContext(int(ctx))


def check_finite(x):
    if not mpmath.isfinite(x):
        raise ArithmeticError(f"non-finite result {x}")
    return x


def to_mpf(x) -> mpf:
    """Convert ints, Fractions, strings and mpf to mpf at the current precision."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def const_pi(ctx) -> mpf:
    ctx = as_context(ctx)
    with ctx.workprec():
        return +mp.pi


# ---------------------------------------------------------------------------
# Bernoulli numbers

_bernoulli_cache: list[Fraction] = [Fraction(1)]
_bernoulli_lock = threading.Lock()


def bernoulli_numbers(n_max: int) -> list[Fraction]:
    """Exact B_0..B_{n_max} with the B_1 = -1/2 convention."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if len(_bernoulli_cache) <= n_max:
        with _bernoulli_lock:
            B = _bernoulli_cache
            for m in range(len(B), n_max + 1):
                if m > 1 and m % 2 == 1:
                    B.append(Fraction(0))
                    continue
                acc = Fraction(0)
                binom = 1  # C(m+1, k)
                for k in range(m):
                    acc += binom * B[k]
                    binom = binom * (m + 1 - k) // (k + 1)
                B.append(-acc / (m + 1))
    return list(_bernoulli_cache[: n_max + 1])


# ---------------------------------------------------------------------------
# Incomplete gamma for integer order


def _e1_series(x: mpf, prec: int) -> mpf:
    # E1(x) = -gamma - log x - sum_{k>=1} (-x)^k / (k k!)
    # terms peak near e^x, so carry extra bits for the cancellation
    extra = int(float(x) * 1.45) + 10
    with mp.workprec(prec + extra):
        x = +x
        eps = mpf(2) ** (-(prec + extra))
        total = mpf(0)
        term = mpf(1)
        k = 0
        while True:
            k += 1
            term *= -x / k
            contrib = term / k
            total += contrib
            if abs(contrib) < eps and k > x:
                break
        return -mp.euler - mp.log(x) - total


def _e1_contfrac(x: mpf, prec: int) -> mpf:
    # modified Lentz on E1(x) = e^-x / (x+1 - 1/(x+3 - 4/(x+5 - ...)))
    with mp.workprec(prec + 10):
        x = +x
        eps = mpf(2) ** (-(prec + 8))
        tiny = mpf(2) ** (-(prec + 200))
        b = x + 1
        f = b
        C = b
        D = mpf(0)
        n = 0
        while True:
            n += 1
            a = -mpf(n) ** 2
            b += 2
            D = b + a * D
            if D == 0:
                D = tiny
            C = b + a / C
            if C == 0:
                C = tiny
            D = 1 / D
            delta = C * D
            f *= delta
            if abs(delta - 1) < eps:
                break
            if n > 100000:
                raise PrecisionUnreachable("E1 continued fraction did not converge")
        return mp.exp(-x) / f


def exp_integral_e1(x, ctx) -> mpf:
    ctx = as_context(ctx)
    with ctx.workprec():
        x = to_mpf(x)
        if x <= 0:
            raise DomainError("E1(x) requires x > 0")
        if x <= E1_SERIES_SWITCH:
            return +_e1_series(x, ctx.working_bits)
        return +_e1_contfrac(x, ctx.working_bits)


def upper_incomplete_gamma(s: int, x, ctx) -> mpf:
    """Gamma(s, x) for integer s >= 0; s = 0 is E1(x)."""
    ctx = as_context(ctx)
    if int(s) != s or s < 0:
        raise DomainError("order must be a non-negative integer")
    s = int(s)
    with ctx.workprec():
        x = to_mpf(x)
        if x < 0:
            raise DomainError("Gamma(s, x) requires x >= 0")
        if s == 0:
            return exp_integral_e1(x, ctx)
        if x == 0:
            return mpf(math.factorial(s - 1))
        ex = mp.exp(-x)
        val = ex  # Gamma(1, x)
        xp = mpf(1)
        for j in range(1, s):
            xp *= x
            val = j * val + xp * ex
        return +val


# ---------------------------------------------------------------------------
# Hurwitz zeta by Euler-Maclaurin


def _em_remainder_bound(s: mpf, base: mpf, M: int) -> mpf:
    # |B_{2M+2}|/(2M+2)! <= 4/(2pi)^(2M+2); times s(s+1)...(s+2M) base^(-s-2M-1)
    poch = mpf(1)
    for j in range(2 * M + 1):
        poch *= s + j
    return 4 * poch / (2 * mp.pi) ** (2 * M + 2) * base ** (-s - 2 * M - 1)


def hurwitz_zeta(s, a, ctx) -> mpf:
    """zeta(s, a) = sum_{n>=0} (n + a)^-s for real s > 1 and 0 < a <= 1."""
    ctx = as_context(ctx)
    bits = ctx.working_bits
    with ctx.workprec():
        s = to_mpf(s)
        a = to_mpf(a)
        if not s > 1:
            raise DomainError("hurwitz_zeta requires s > 1")
        if not (0 < a <= 1):
            raise DomainError("hurwitz_zeta requires 0 < a <= 1")
        M = max(4, bits // 12)
        N = max(8, bits // 8)
        eps = mpf(2) ** (-bits)
        with mp.workprec(64):
            while _em_remainder_bound(mpf(s), mpf(N) + mpf(a), M) > eps:
                N *= 2
        with mp.workprec(bits + 16):
            total = mpf(0)
            for n in range(N):
                total += (n + a) ** (-s)
            base = N + a
            total += base ** (1 - s) / (s - 1) + base ** (-s) / 2
            B = bernoulli_numbers(2 * M)
            # d_k = s(s+1)...(s+2k-2) base^(-s-2k+1) / (2k)!
            poch = s
            fact = mpf(2)
            bpow = base ** (-s - 1)
            inv_base2 = 1 / (base * base)
            for k in range(1, M + 1):
                total += to_mpf(B[2 * k]) * poch / fact * bpow
                poch *= (s + 2 * k - 1) * (s + 2 * k)
                fact *= (2 * k + 1) * (2 * k + 2)
                bpow *= inv_base2
        return +total


def riemann_zeta(s, ctx) -> mpf:
    return hurwitz_zeta(s, 1, ctx)
