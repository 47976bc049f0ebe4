"""Dedekind eta, eta quotients, Weber functions and nome-based evaluators.

Everything stays real: a point tau = re + i*sqrt(im_sq) with re in {0, 1/2}
has a real nome of either sign, and eta at such a point is reported with
the unimodular phase of q^(1/24) removed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import mp, mpf

from .numkernel import DomainError, PrecisionContext, as_context, to_mpf


# ---------------------------------------------------------------------------
# exact integer series


class IntSeries:
    """Truncated power series sum_{k<=M} a_k q^k with exact integer coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[int]):
        c = tuple(int(x) for x in coeffs)
        if not c:
            raise ValueError("empty series")
        self._c = c

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self._c

    def __getitem__(self, k):
        return self._c[k]

    def __len__(self):
        return len(self._c)

    def __eq__(self, other):
        return isinstance(other, IntSeries) and self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        terms = [f"{a}*q^{k}" for k, a in enumerate(self._c) if a]
        return f"IntSeries({' + '.join(terms) or '0'}, M={self.order})"

    def truncate(self, M: int) -> "IntSeries":
        c = self._c[: M + 1]
        return IntSeries(c + (0,) * (M + 1 - len(c)))

    @classmethod
    def one(cls, M: int) -> "IntSeries":
        return cls((1,) + (0,) * M)

    def __add__(self, other: "IntSeries") -> "IntSeries":
        M = min(self.order, other.order)
        return IntSeries(self._c[k] + other._c[k] for k in range(M + 1))

    def __sub__(self, other: "IntSeries") -> "IntSeries":
        M = min(self.order, other.order)
        return IntSeries(self._c[k] - other._c[k] for k in range(M + 1))

    def scale(self, n: int) -> "IntSeries":
        return IntSeries(n * a for a in self._c)

    def __mul__(self, other: "IntSeries") -> "IntSeries":
        M = min(self.order, other.order)
        a, b = self._c, other._c
        out = [0] * (M + 1)
        nz = [(j, bj) for j, bj in enumerate(b[: M + 1]) if bj]
        for i in range(M + 1):
            ai = a[i]
            if not ai:
                continue
            for j, bj in nz:
                if i + j > M:
                    break
                out[i + j] += ai * bj
        return IntSeries(out)

    def dilate(self, d: int) -> "IntSeries":
        """Substitute q -> q^d, keeping the truncation order."""
        M = self.order
        out = [0] * (M + 1)
        for k, a in enumerate(self._c):
            if k * d > M:
                break
            out[k * d] = a
        return IntSeries(out)

    def __pow__(self, e: int) -> "IntSeries":
        # Miller recurrence; valid for any integer e when a_0 = +-1
        a = self._c
        if a[0] not in (1, -1):
            raise ZeroDivisionError("power needs a unit constant term")
        M = self.order
        nz = [(k, ak) for k, ak in enumerate(a) if ak and k > 0]
        g = [0] * (M + 1)
        g[0] = a[0] ** e if e >= 0 else a[0]
        for n in range(1, M + 1):
            acc = 0
            for k, ak in nz:
                if k > n:
                    break
                acc += ((e + 1) * k - n) * ak * g[n - k]
            q, r = divmod(acc, n * a[0])
            if r:
                raise ArithmeticError("non-integral coefficient in series power")
            g[n] = q
        return IntSeries(g)

    def inverse(self) -> "IntSeries":
        return self ** -1

    def __truediv__(self, other: "IntSeries") -> "IntSeries":
        if other._c[0] not in (1, -1):
            raise ZeroDivisionError("divisor must have unit leading coefficient")
        return self * other.inverse()


def eta_coeffs(M: int) -> IntSeries:
    """prod_{n>=1} (1 - q^n) to order M from Euler's pentagonal theorem."""
    if M < 0:
        raise ValueError("M must be >= 0")
    c = [0] * (M + 1)
    c[0] = 1
    k = 1
    while True:
        p1 = k * (3 * k - 1) // 2
        if p1 > M:
            break
        sign = -1 if k % 2 else 1
        c[p1] += sign
        p2 = k * (3 * k + 1) // 2
        if p2 <= M:
            c[p2] += sign
        k += 1
    return IntSeries(c)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod_d eta(d tau)^{e_d}, stored as ((d, e_d), ...)."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for d, e in self.factors:
            if d < 1 or e == 0:
                raise ValueError(f"bad factor eta({d}tau)^{e}")

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(sum(d * e for d, e in self.factors), 24)


def eta_quotient_coeffs(spec: EtaQuotientSpec, M: int) -> tuple[IntSeries, Fraction]:
    """Integer part of the expansion and the leading power of q.

    The form equals q^lead * series; for the named cusp forms lead = 1 and
    ``series[k - 1]`` is the k-th Fourier coefficient.
    """
    base = eta_coeffs(M)
    out = IntSeries.one(M)
    for d, e in spec.factors:
        out = out * (base.dilate(d) ** e)
    return out, spec.leading_exponent


def form_coefficients(spec: EtaQuotientSpec, M: int) -> list[int]:
    """[a(1), ..., a(M)] of an eta quotient whose leading exponent is 1."""
    series, lead = eta_quotient_coeffs(spec, M)
    if lead != 1:
        raise ValueError(f"leading exponent {lead} != 1")
    return [0] + list(series.coefficients[:M])


def brute_force_product(spec: EtaQuotientSpec, M: int) -> IntSeries:
    """Independent check: multiply (1 - q^{dn})^{e} factor by factor."""
    out = IntSeries.one(M)
    for d, e in spec.factors:
        for n in range(1, M // d + 1):
            f = [0] * (M + 1)
            f[0] = 1
            f[d * n] = -1
            out = out * (IntSeries(f) ** e)
    return out


# ---------------------------------------------------------------------------
# points and nomes


@dataclass(frozen=True)
class CMPoint:
    """tau = re + i*sqrt(im_sq) in the upper half plane."""

    re: Fraction
    im_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im_sq", Fraction(self.im_sq))
        if self.im_sq <= 0:
            raise ValueError("im_sq must be positive")

    @classmethod
    def sqrt_neg(cls, m, den=1) -> "CMPoint":
        """The point sqrt(-m)/den."""
        return cls(Fraction(0), Fraction(m) / Fraction(den) ** 2)

    def im(self, ctx) -> mpf:
        ctx = as_context(ctx)
        with ctx.workprec():
            return mp.sqrt(to_mpf(self.im_sq))

    def nome(self, ctx) -> "Nome":
        ctx = as_context(ctx)
        frac = self.re % 1
        if frac not in (0, Fraction(1, 2)):
            raise DomainError("only Re(tau) in {0, 1/2} (mod 1) has a real nome")
        with ctx.workprec():
            mag = mp.exp(-2 * mp.pi * self.im(ctx))
        return Nome(mag, -1 if frac else 1)

    def scaled(self, c) -> "CMPoint":
        c = Fraction(c)
        return CMPoint(self.re * c, self.im_sq * c * c)

    def __str__(self):
        return f"{self.re}+i*sqrt({self.im_sq})"


@dataclass(frozen=True)
class Nome:
    magnitude: mpf
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")
        if not (0 < self.magnitude < 1):
            raise DomainError("nome magnitude must lie in (0, 1)")

    @classmethod
    def from_value(cls, q) -> "Nome":
        q = to_mpf(q)
        return cls(abs(q), -1 if q < 0 else 1)

    @property
    def value(self) -> mpf:
        return self.sign * self.magnitude

    def power(self, n: int) -> "Nome":
        return Nome(self.magnitude ** n, self.sign ** n)

    def __neg__(self) -> "Nome":
        return Nome(self.magnitude, -self.sign)


# ---------------------------------------------------------------------------
# numerical eta products


def euler_product(q, ctx) -> mpf:
    """prod_{n>=1} (1 - q^n) for real |q| < 1 via the pentagonal series."""
    ctx = as_context(ctx)
    with ctx.workprec():
        q = +to_mpf(q)
        if not abs(q) < 1:
            raise DomainError("|q| must be < 1")
        eps = ctx.eps
        total = mpf(1)
        k = 1
        while True:
            e1 = k * (3 * k - 1) // 2
            t1 = q ** e1
            if abs(t1) < eps and e1 > 0:
                break
            sign = -1 if k % 2 else 1
            total += sign * (t1 + q ** (e1 + k))
            k += 1
        return total


def _log_euler_product(q, ctx) -> mpf:
    # sum log(1 - q^n); second route used by the consistency checks
    ctx = as_context(ctx)
    with ctx.workprec():
        q = +to_mpf(q)
        total = mpf(0)
        n = 1
        qn = q
        while abs(qn) > ctx.eps:
            total += mp.log1p(-qn)
            n += 1
            qn *= q
        return total


def eta_value(tau: CMPoint, ctx) -> mpf:
    """eta(tau) with the phase exp(2 pi i Re(tau)/24) stripped; exact eta when Re(tau) = 0."""
    ctx = as_context(ctx)
    nome = tau.nome(ctx)
    with ctx.workprec():
        t = tau.im(ctx)
        return mp.exp(-2 * mp.pi * t / 24) * euler_product(nome.value, ctx)


def eta_value_logsum(tau: CMPoint, ctx) -> mpf:
    ctx = as_context(ctx)
    nome = tau.nome(ctx)
    with ctx.workprec():
        t = tau.im(ctx)
        return mp.exp(-2 * mp.pi * t / 24 + _log_euler_product(nome.value, ctx))


def _require_imaginary(tau: CMPoint):
    if tau.re != 0:
        raise DomainError("Weber functions here need a purely imaginary tau")


def weber_f(tau: CMPoint, ctx) -> mpf:
    """e^{-pi i/24} eta((tau+1)/2) / eta(tau)."""
    _require_imaginary(tau)
    ctx = as_context(ctx)
    half = CMPoint(Fraction(1, 2), tau.im_sq / 4)
    with ctx.workprec():
        return eta_value(half, ctx) / eta_value(tau, ctx)


def weber_f1(tau: CMPoint, ctx) -> mpf:
    """eta(tau/2) / eta(tau)."""
    _require_imaginary(tau)
    ctx = as_context(ctx)
    with ctx.workprec():
        return eta_value(tau.scaled(Fraction(1, 2)), ctx) / eta_value(tau, ctx)


def weber_f2(tau: CMPoint, ctx) -> mpf:
    """sqrt(2) eta(2 tau) / eta(tau)."""
    _require_imaginary(tau)
    ctx = as_context(ctx)
    with ctx.workprec():
        return mp.sqrt(2) * eta_value(tau.scaled(2), ctx) / eta_value(tau, ctx)


# ---------------------------------------------------------------------------
# modular parameters s_2, s_3, s_4

_T_MIN = {2: (1, 4), 3: (1, 3), 4: (1, 2)}  # Im(tau)^2 lower bounds
_S_BOUNDARY = {2: 64, 3: 108, 4: 256}


def _nome_arg(q, ctx) -> mpf:
    if isinstance(q, Nome):
        return q.value
    return to_mpf(q)


def _check_positive_nome(q):
    if not (0 < q < 1):
        raise DomainError("s_j needs a real nome in (0, 1)")


def s2(q, ctx) -> mpf:
    """-Delta(tau + 1/2)/Delta(2 tau + 1) = q^-1 prod((1-(-q)^n)/(1-q^{2n}))^24."""
    ctx = as_context(ctx)
    with ctx.workprec():
        q = _nome_arg(q, ctx)
        _check_positive_nome(q)
        r = euler_product(-q, ctx) / euler_product(q * q, ctx)
        return r ** 24 / q


def s3(q, ctx) -> mpf:
    ctx = as_context(ctx)
    with ctx.workprec():
        q = _nome_arg(q, ctx)
        _check_positive_nome(q)
        # (eta(3tau)/eta(tau))^6 = q^(1/2) (P(q^3)/P(q))^6
        u = mp.sqrt(q) * (euler_product(q ** 3, ctx) / euler_product(q, ctx)) ** 6
        return (27 * u + 1 / u) ** 2


def s4(q, ctx) -> mpf:
    ctx = as_context(ctx)
    with ctx.workprec():
        q = _nome_arg(q, ctx)
        _check_positive_nome(q)
        p1 = euler_product(q, ctx)
        p2 = euler_product(q * q, ctx)
        p4 = euler_product(q ** 4, ctx)
        ratio = q * (p2 / p1) ** 24  # Delta(2tau)/Delta(tau)
        # (eta(tau) eta(4tau)^2 / eta(2tau)^3)^4 = q^(1/2) (P1 P4^2 / P2^3)^4
        u = mp.sqrt(q) * (p1 * p4 ** 2 / p2 ** 3) ** 4
        return ratio * (16 * u + 1 / u) ** 4


S_FUNCTIONS = {2: s2, 3: s3, 4: s4}


def s_value(level: int, q, ctx) -> mpf:
    try:
        return S_FUNCTIONS[level](q, ctx)
    except KeyError:
        raise ValueError(f"level must be 2, 3 or 4, got {level}") from None


def g_series(q, ctx) -> mpf:
    """G(q) = -log|q| + 240 sum n^2 log(1 - q^n) for a signed real nome."""
    ctx = as_context(ctx)
    with ctx.workprec():
        q = +_nome_arg(q, ctx)
        aq = abs(q)
        if not (0 < aq < 1):
            raise DomainError("G needs 0 < |q| < 1")
        eps = ctx.eps
        total = mpf(0)
        qn = mpf(1)
        n = 0
        while True:
            n += 1
            qn *= q
            total += n * n * mp.log1p(-qn)
            # |log(1-x)| <= |x|/(1-|x|): geometric majorant of the tail
            if 240 * n * n * abs(qn) / (1 - aq) ** 2 < eps and (n + 1) ** 2 * aq < n * n:
                break
        return -mp.log(aq) + 240 * total


# ---------------------------------------------------------------------------
# inversion of s_j on the admissible nome interval


class BracketError(RuntimeError):
    """The target value is not bracketed by s_j on the admissible interval."""


def t_min(level: int, ctx) -> mpf:
    num, den = _T_MIN[level]
    ctx = as_context(ctx)
    with ctx.workprec():
        return mp.sqrt(mpf(num) / den)


def q_boundary(level: int, ctx) -> mpf:
    ctx = as_context(ctx)
    with ctx.workprec():
        return mp.exp(-2 * mp.pi * t_min(level, ctx))


def _log_s_of_t(level, t, ctx):
    with ctx.workprec():
        return mp.log(s_value(level, mp.exp(-2 * mp.pi * t), ctx))


def invert_s(level: int, k, ctx) -> Nome:
    """Real nome q in (0, q_boundary] with s_level(q) = k."""
    if level not in S_FUNCTIONS:
        raise ValueError(f"level must be 2, 3 or 4, got {level}")
    ctx = as_context(ctx)
    lo_ctx = PrecisionContext(15)
    with ctx.workprec():
        k = to_mpf(k)
        if k < _S_BOUNDARY[level] * (1 - mpf(2) ** (-ctx.working_bits // 2)):
            raise BracketError(f"k = {k} below s_{level} boundary value {_S_BOUNDARY[level]}")
        target = mp.log(k)
    with lo_ctx.workprec():
        t_lo = t_min(level, lo_ctx)
        t_hi = float(target) / (2 * float(mp.pi)) + 2.0
        grid = [t_lo + (t_hi - t_lo) * i / 99 for i in range(100)]
        vals = [_log_s_of_t(level, t, lo_ctx) for t in grid]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise BracketError(f"s_{level} not monotone on the admissible interval")
        f_lo = vals[0] - target
        f_hi = vals[-1] - target
        if f_lo > 1e-12 or f_hi < 0:
            raise BracketError(f"s_{level} does not bracket k = {k}")
        a, b = mpf(t_lo), mpf(t_hi)
        for _ in range(60):
            mid = (a + b) / 2
            if _log_s_of_t(level, mid, lo_ctx) - target > 0:
                b = mid
            else:
                a = mid
    # Newton with a central-difference derivative, doubling precision
    with ctx.workprec():
        t = (a + b) / 2
        tol = ctx.eps * 4
        for _ in range(200):
            f = _log_s_of_t(level, t, ctx) - target
            h = mpf(2) ** (-ctx.working_bits // 3)
            df = (_log_s_of_t(level, t + h, ctx) - _log_s_of_t(level, t - h, ctx)) / (2 * h)
            step = f / df
            t -= step
            if abs(step) < tol:
                break
        t = max(t, t_min(level, ctx))
        return Nome(mp.exp(-2 * mp.pi * t), 1)
