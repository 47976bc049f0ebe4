"""Dirichlet and weight-3 newform L-values, and the Eisenstein-Kronecker sums.

L(f, 3) for a weight-3 newform is computed from the completed function
Lambda(s) = (sqrt(N)/2pi)^s Gamma(s) L(f, s) = eps * Lambda(3 - s) by splitting
the Mellin integral at the Fricke fixed point:

    Lambda(3) = sum_k a(k) [Gamma(3, c_k)/c_k^3 + eps * E1(c_k)],  c_k = 2 pi k / sqrt(N)

which converges like exp(-2 pi k / sqrt(N)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from mpmath import mp, mpf

from . import lattice, qseries
from .numkernel import (
    DomainError,
    PrecisionContext,
    PrecisionUnreachable,
    as_context,
    exp_integral_e1,
    hurwitz_zeta,
    upper_incomplete_gamma,
)
from .qseries import CMPoint, EtaQuotientSpec


class InsufficientCoefficients(RuntimeError):
    def __init__(self, label: str, available: int, required: int):
        self.label = label
        self.available = available
        self.required = required
        super().__init__(
            f"form {label}: {available} coefficients available, K = {required} required")


class UnsupportedSign(ValueError):
    pass


@dataclass(frozen=True)
class LValue:
    value: mpf
    quantity: str
    method: str
    error_estimate: mpf


# ---------------------------------------------------------------------------
# newform specifications

ETA_SPECS = {
    "f": EtaQuotientSpec(((1, 2), (2, 1), (4, 1), (8, 2))),
    "g": EtaQuotientSpec(((2, 3), (6, 3))),
    "h": EtaQuotientSpec(((4, 6),)),
    "g48": EtaQuotientSpec(((4, 9), (12, 9), (2, -3), (6, -3), (8, -3), (24, -3))),
}


@dataclass
class NewformSpec:
    label: str
    level: int
    character: int
    epsilon: int = 1
    coeff_source: str = "eta"  # "eta" | "theta" | "file"
    stored: tuple[int, ...] | None = None  # (0, a(1), ..., a(M)) for file sources
    note: str = ""
    weight: int = field(default=3, init=False)
    _cache: tuple[int, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        if self.coeff_source not in ("eta", "theta", "file"):
            raise ValueError(f"unknown coefficient source {self.coeff_source}")
        if self.coeff_source == "file":
            if not self.stored or len(self.stored) < 2 or self.stored[1] != 1:
                raise ValueError("stored coefficients must start with a(1) = 1")

    @property
    def available(self) -> int | None:
        return len(self.stored) - 1 if self.coeff_source == "file" else None

    def coefficients(self, M: int) -> tuple[int, ...]:
        """(0, a(1), ..., a(M))."""
        if len(self._cache) > M:
            return self._cache[: M + 1]
        if self.coeff_source == "file":
            if self.available < M:
                raise InsufficientCoefficients(self.label, self.available, M)
            return self.stored[: M + 1]
        size = max(M, 2 * len(self._cache), 64)
        if self.coeff_source == "eta":
            c = tuple(qseries.form_coefficients(ETA_SPECS[self.label], size))
        else:
            c = lattice.theta_form_coefficients(self.label, size)
        self._cache = c
        return c[: M + 1]


def builtin_forms() -> dict[str, NewformSpec]:
    return {
        "f": NewformSpec("f", 8, -8, 1, "eta"),
        "g": NewformSpec("g", 12, -3, 1, "eta"),
        "h": NewformSpec("h", 16, -4, 1, "eta"),
        "g48": NewformSpec("g48", 48, -3, 1, "eta"),
        "g24_1": NewformSpec("g24_1", 24, -24, 1, "theta"),
        "g24_2": NewformSpec("g24_2", 24, -24, 1, "theta"),
        "g40": NewformSpec("g40", 40, -40, 1, "theta"),
    }


# ---------------------------------------------------------------------------
# Dirichlet L-values


def dirichlet_l(D: int, s: int, ctx) -> LValue:
    """L(chi_D, s) = |D|^-s sum_{j=1}^{|D|} chi_D(j) zeta(s, j/|D|) for a primitive chi_D."""
    ctx = as_context(ctx)
    if s < 2:
        raise DomainError("dirichlet_l needs s >= 2")
    q = abs(D)
    with ctx.workprec():
        total = mpf(0)
        for j in range(1, q + 1):
            chi = lattice.kronecker_chi(D, j)
            if chi:
                total += chi * hurwitz_zeta(s, Fraction(j, q), ctx)
        value = total / mpf(q) ** s
    return LValue(value, f"L(chi_{D},{s})", "hurwitz", ctx.eps * q)


def dirichlet_lprime_minus1(D: int, ctx) -> LValue:
    """L'(chi_D, -1) = |D|^(3/2)/(4 pi) L(chi_D, 2) for odd chi_D (D < 0)."""
    if D >= 0:
        raise DomainError("L'(chi_D, -1) conversion needs an odd character, D < 0")
    ctx = as_context(ctx)
    l2 = dirichlet_l(D, 2, ctx)
    with ctx.workprec():
        q = mpf(-D)
        value = q * mp.sqrt(q) / (4 * mp.pi) * l2.value
    return LValue(value, f"L'(chi_{D},-1)", "hurwitz+FE", l2.error_estimate * q ** 1.5)


# ---------------------------------------------------------------------------
# smoothed newform L-values


def _tail_log_bound(k: int, N: int) -> float:
    # log of a bound on the k-th term using |a(k)| <= d(k) k <= 2 sqrt(k) k
    c = 2 * math.pi * k / math.sqrt(N)
    term = (c * c + 2 * c + 2) / (2 * math.pi * k) ** 3 + 1 / (c * N ** 1.5)
    ratio = math.exp(-2 * math.pi / math.sqrt(N))
    return (math.log(2 * k ** 1.5) + 3 * math.log(2 * math.pi) - math.log(2)
            + math.log(term) - c - math.log1p(-ratio))


def required_terms(N: int, bits: int) -> int:
    """Smallest K whose tail bound beyond K is below 2^-bits."""
    target = -bits * math.log(2)
    k = max(1, int(math.sqrt(N) * bits * math.log(2) / (2 * math.pi) * 0.5))
    while _tail_log_bound(k, N) > target:
        k += 1
    return k


def newform_l3(spec: NewformSpec, ctx, K: int | None = None) -> LValue:
    ctx = as_context(ctx)
    N = spec.level
    bits = ctx.working_bits
    K_req = required_terms(N, bits)
    if K is None:
        K = K_req
    a = spec.coefficients(K)
    with ctx.workprec():
        two_pi = 2 * mp.pi
        sqrtN = mp.sqrt(N)
        Nf = sqrtN ** 3
        total = mpf(0)
        for k in range(1, K + 1):
            ak = a[k]
            if not ak:
                continue
            c = two_pi * k / sqrtN
            g3 = upper_incomplete_gamma(3, c, ctx)
            e1 = exp_integral_e1(c, ctx)
            total += ak * (g3 / (two_pi * k) ** 3 + spec.epsilon * e1 / Nf)
        value = two_pi ** 3 / 2 * total
        if K >= K_req:
            err = mpf(2) ** (-bits) * (1 + abs(value))
        else:
            err = mp.exp(_tail_log_bound(K + 1, N)) + mpf(2) ** (-bits)
    return LValue(value, f"L({spec.label},3)", f"smoothed(K={K},eps={spec.epsilon:+d})", err)


def lprime0_factor(N: int, ctx) -> mpf:
    """2 (sqrt(N)/2pi)^3: L'(f,0) = factor * L(f,3) when the sign is +1."""
    ctx = as_context(ctx)
    with ctx.workprec():
        return 2 * (mp.sqrt(N) / (2 * mp.pi)) ** 3


def lprime0_from_l3(N: int, l3, ctx, epsilon: int = 1) -> mpf:
    if epsilon != 1:
        raise UnsupportedSign("L'(f,0) conversion implemented for sign +1 only")
    ctx = as_context(ctx)
    with ctx.workprec():
        return lprime0_factor(N, ctx) * l3


def newform_lprime0(spec: NewformSpec, ctx) -> LValue:
    l3 = newform_l3(spec, ctx)
    value = lprime0_from_l3(spec.level, l3.value, ctx, spec.epsilon)
    with as_context(ctx).workprec():
        err = lprime0_factor(spec.level, ctx) * l3.error_estimate
    return LValue(value, f"L'({spec.label},0)", l3.method + "+FE", err)


def direct_l3(coeffs: Sequence[int], s: float = 3.0) -> float:
    """Plain partial Dirichlet sum sum_k a(k) k^-s in double precision (oracle)."""
    a = np.asarray(coeffs[1:], dtype=np.float64)
    k = np.arange(1, len(a) + 1, dtype=np.float64)
    return float(np.sum(a * k ** (-s)))


# ---------------------------------------------------------------------------
# Eisenstein-Kronecker double sums

EK_PARAMS = {
    # family -> (dilation, weight, prefactor numerator / denominator, Im(tau)^2 lower bound)
    2: (4, 16, Fraction(2), Fraction(1, 4)),
    3: (3, 9, Fraction(15, 4), Fraction(1, 3)),
    4: (2, 4, Fraction(10), Fraction(1, 2)),
}


def _ek_box(x: float, t: float, d: int, R: int) -> float:
    """sum' over |m|,|n| <= R of 4(dmx+n)^2/|dm tau+n|^6 - 1/|dm tau+n|^4."""
    total = 0.0
    n = np.arange(-R, R + 1, dtype=np.float64)
    for m in range(-R, R + 1):
        re = d * m * x + n
        norm = re * re + (d * m * t) ** 2
        if m == 0:
            norm[R] = 1.0
            re = re.copy()
            re[R] = 0.0
        inv2 = 1.0 / (norm * norm)
        vals = 4 * re * re * inv2 / norm - inv2
        if m == 0:
            vals[R] = 0.0
        total += math.fsum(vals)
    return total


def _ek_raw(x: float, t: float, family: int, R: int) -> float:
    d, w, pref, _ = EK_PARAMS[family]
    return float(pref) * t / math.pi ** 3 * (-_ek_box(x, t, 1, R) + w * _ek_box(x, t, d, R))


def eisenstein_kronecker(tau: CMPoint, family: int, digits_low: int = 4,
                         R0: int = 64, R_cap: int = 2 * 10 ** 4) -> LValue:
    """Direct lattice evaluation of f_family(s_family(q(tau))) as an Eisenstein-Kronecker double sum.

    Box truncation error is ~C/R^2; values at R and 2R are Richardson-combined
    and R doubles until two successive extrapolations agree.
    """
    if family not in EK_PARAMS:
        raise ValueError("family must be 2, 3 or 4")
    d, w, pref, lower = EK_PARAMS[family]
    if tau.im_sq < lower:
        raise DomainError(f"Im(tau)^2 = {tau.im_sq} below {lower} for family {family}")
    x = float(tau.re)
    t = math.sqrt(float(tau.im_sq))
    tol = 10.0 ** (-digits_low - 1)
    R = R0
    prev_raw = _ek_raw(x, t, family, R)
    prev_ext = None
    while True:
        if 2 * R > R_cap:
            raise PrecisionUnreachable(f"Eisenstein-Kronecker sum needs R > {R_cap}")
        raw = _ek_raw(x, t, family, 2 * R)
        ext = (4 * raw - prev_raw) / 3
        if prev_ext is not None:
            err = abs(ext - prev_ext)
            if err < tol * max(1.0, abs(ext)):
                return LValue(mpf(ext), f"f{family}(s{family}(q({tau})))",
                              f"eisenstein-kronecker(R={2 * R})", mpf(err))
        prev_raw, prev_ext = raw, ext
        R *= 2
