"""Generalized hypergeometric series with rational parameters.

``pfq`` sums inside the unit disc with a certified geometric tail bound;
``pfq_unit`` handles x = +-1 through the Levin u-transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from mpmath import mp, mpf

from .numkernel import PrecisionUnreachable, as_context, bits_for_digits, to_mpf


class DivergenceError(ValueError):
    pass


class AccelerationStagnation(PrecisionUnreachable):
    pass


@dataclass(frozen=True)
class HyperParams:
    upper: tuple
    lower: tuple
    x: object = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(Fraction(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(Fraction(b) for b in self.lower))
        if isinstance(self.x, (int, str)):
            object.__setattr__(self, "x", Fraction(self.x))
        for b in self.lower:
            if b <= 0 and b.denominator == 1:
                raise ValueError(f"lower parameter {b} is a non-positive integer")

    @property
    def sigma(self) -> Fraction:
        return sum(self.lower, Fraction(0)) - sum(self.upper, Fraction(0))

    def at(self, x) -> "HyperParams":
        return HyperParams(self.upper, self.lower, x)

    def __str__(self):
        up = ",".join(str(a) for a in self.upper)
        lo = ",".join(str(b) for b in self.lower)
        return f"{len(self.upper)}F{len(self.lower)}({up};{lo};{self.x})"


# the three 5F4 families
F2_PARAMS = HyperParams((Fraction(3, 2),) * 3 + (1, 1), (2, 2, 2, 2))
F3_PARAMS = HyperParams((Fraction(4, 3), Fraction(3, 2), Fraction(5, 3), 1, 1), (2, 2, 2, 2))
F4_PARAMS = HyperParams((Fraction(5, 4), Fraction(3, 2), Fraction(7, 4), 1, 1), (2, 2, 2, 2))


def _ratio(params: HyperParams, n: int) -> Fraction:
    """t_{n+1}/t_n without the x factor."""
    num = Fraction(1)
    for a in params.upper:
        num *= a + n
    den = Fraction(n + 1)
    for b in params.lower:
        den *= b + n
    return num / den


def _ratio_sup(params: HyperParams, n: int):
    """Upper bound of |t_{m+1}/t_m| / |x| over m >= n, or None if not yet available."""
    ups = list(params.upper)
    lows = list(params.lower) + [Fraction(1)]
    if len(ups) > len(lows):
        return None
    if any(a + n <= 0 for a in ups) or any(b + n <= 0 for b in lows):
        return None
    bound = Fraction(1)
    for i, b in enumerate(lows):
        if i < len(ups):
            r = (ups[i] + n) / (b + n)
            bound *= max(Fraction(1), r)
        else:
            bound *= 1 / (b + n) if b + n < 1 else Fraction(1)
    return bound


def pfq(params: HyperParams, ctx) -> mpf:
    """Sum of the series for |x| < 1 with truncation |t_n| rho/(1 - rho) < 2^-bits."""
    ctx = as_context(ctx)
    with ctx.workprec():
        x = to_mpf(params.x)
        ax = abs(x)
        if ax >= 1:
            raise DivergenceError(f"pfq needs |x| < 1, got {params.x}; use pfq_unit")
        if x == 0:
            return mpf(1)
        if any(a <= 0 and a.denominator == 1 for a in params.upper):
            pass  # terminating series; loop ends when the term vanishes
        eps = ctx.eps
        total = mpf(1)
        term = mpf(1)
        n = 0
        while True:
            term *= to_mpf(_ratio(params, n)) * x
            n += 1
            total += term
            if term == 0:
                break
            sup = _ratio_sup(params, n)
            if sup is not None:
                rho = to_mpf(sup) * ax
                if rho < 1 and abs(term) * rho / (1 - rho) < eps * max(1, abs(total)):
                    break
            if n > 10 ** 7:
                raise PrecisionUnreachable("pfq did not converge")
        return total


@dataclass(frozen=True)
class UnitValue:
    value: mpf
    error_estimate: mpf
    order: int

    @property
    def digits(self) -> int:
        if self.error_estimate == 0:
            return mp.dps
        import math

        return max(0, int(math.floor(-math.log10(float(self.error_estimate)
                                                  / max(1.0, abs(float(self.value)))))))


def levin_u(terms, beta=1):
    """Levin u-transform T_k (k = 1..len-1) of the series with the given terms, from n = 0.

    omega_j = (beta + j) a_j.  Returns the list of successive-order estimates.
    """
    partial = []
    s = mpf(0)
    for a in terms:
        s += a
        partial.append(s)
    out = []
    for k in range(1, len(terms)):
        num = mpf(0)
        den = mpf(0)
        bk = beta + k
        for j in range(k + 1):
            w = (beta + j) * terms[j]
            c = (-1) ** j * comb(k, j) * (mpf(beta + j) / bk) ** (k - 1) / w
            num += c * partial[j]
            den += c
        out.append(num / den)
    return out


def pfq_unit(params: HyperParams, ctx_low=8, max_order: int = 40) -> UnitValue:
    """Levin-u accelerated value at x = +-1.

    Convergence needs sigma = sum(b) - sum(a) > 0 at x = 1 and sigma > -1 at x = -1.
    """
    ctx = as_context(ctx_low)
    x = Fraction(params.x)
    if abs(x) != 1:
        raise ValueError("pfq_unit is for x = +-1")
    if len(params.upper) != len(params.lower) + 1:
        raise ValueError("unit-argument acceleration expects p = q + 1")
    if params.sigma <= (0 if x == 1 else -1):
        raise DivergenceError(f"series diverges at x = {x} (sigma = {params.sigma})")
    target = bits_for_digits(ctx.target_digits)
    # Levin weights grow like (k!)-ish; carry twice the target plus headroom
    with mp.workprec(2 * target + 6 * max_order + 64):
        terms = [mpf(1)]
        t = mpf(1)
        for n in range(max_order + 1):
            t *= to_mpf(_ratio(params, n)) * x
            terms.append(t)
        est = levin_u(terms)
        tol = mpf(10) ** (-ctx.target_digits)
        best = None
        for k in range(2, len(est)):
            diff = abs(est[k] - est[k - 1])
            if best is None or diff < best[1]:
                best = (k, diff)
            if diff < tol * max(1, abs(est[k])) / 100:
                # keep going while differences shrink, then report
                pass
        k, diff = best
        value = est[k]
        if diff > tol * max(1, abs(value)):
            raise AccelerationStagnation(
                f"Levin-u on {params} stalled: successive orders differ by {mp.nstr(diff, 3)}")
        return UnitValue(+value, diff, k + 1)
