"""Mahler measures of the f_2, f_3, f_4 and Q_k families.

Routes:
  hyper           log|k| - (c/k) 5F4(...; r/k), valid for |k| >= 64, 128, 256
  gseries         -G(q)/15 + 4G(q^4)/15 and friends at s_j(q) = k, exponential convergence
  integral        quasi-Monte Carlo on the torus, 2-3 digits
  qk-composition  m(Q_{z-4}) as a combination of two f_3 values
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath import mp, mpf

from . import hyper, qseries
from .numkernel import DomainError, as_context, to_mpf
from .qseries import CMPoint, Nome


class UnroutableError(DomainError):
    pass


class RouteDisagreement(ArithmeticError):
    pass


@dataclass(frozen=True)
class MeasureResult:
    value: mpf
    route: str
    error_estimate: mpf
    s_value: mpf | None = None


# family -> (hyper threshold, numerator c, argument scale r, parameters)
HYPER_ROUTE = {
    2: (64, 8, 64, hyper.F2_PARAMS),
    3: (128, 12, 108, hyper.F3_PARAMS),
    4: (256, 24, 256, hyper.F4_PARAMS),
}

# family -> (dilation j, coefficient of G(q), coefficient of G(q^j))
GSERIES_ROUTE = {
    2: (4, Fraction(-1, 15), Fraction(4, 15)),
    3: (3, Fraction(-1, 8), Fraction(3, 8)),
    4: (2, Fraction(-1, 3), Fraction(2, 3)),
}

S_BOUNDARY = {2: 64, 3: 108, 4: 256}
IM_SQ_MIN = {2: Fraction(1, 4), 3: Fraction(1, 3), 4: Fraction(1, 2)}


def _exact(k):
    if isinstance(k, (int, Fraction)):
        return Fraction(k)
    if isinstance(k, str):
        return Fraction(k)
    return None


def f_hyper(family: int, k, ctx) -> MeasureResult:
    """f_family(k) = log|k| - (c/k) 5F4(...; r/k)."""
    threshold, c, r, params = HYPER_ROUTE[family]
    ctx = as_context(ctx)
    kx = _exact(k)
    with ctx.workprec():
        kv = to_mpf(kx if kx is not None else k)
        if kv == 0 or abs(kv) < threshold:
            raise DomainError(f"f{family} hypergeometric route needs |k| >= {threshold}")
        x = Fraction(r) / kx if kx is not None else r / kv
        if kx is not None and abs(x) == 1:
            unit = hyper.pfq_unit(params.at(x), ctx.target_digits)
            F, err, route = unit.value, unit.error_estimate, "hyper-unit(levin-u)"
        else:
            F = hyper.pfq(params.at(x), ctx)
            err, route = ctx.eps, "hyper"
        value = mp.log(abs(kv)) - c / kv * F
        return MeasureResult(value, route, abs(c / kv) * err)


def _as_nome(q, ctx) -> Nome:
    if isinstance(q, Nome):
        return q
    if isinstance(q, CMPoint):
        return q.nome(ctx)
    return Nome.from_value(q)


def f_gseries(family: int, q, ctx) -> MeasureResult:
    """f_family(s_family(q)) from the G-series combination."""
    ctx = as_context(ctx)
    j, c1, cj = GSERIES_ROUTE[family]
    if isinstance(q, CMPoint) and (q.re != 0 or q.im_sq < IM_SQ_MIN[family]):
        raise DomainError(f"tau = {q} outside the f{family} strip Im(tau)^2 >= {IM_SQ_MIN[family]}")
    nome = _as_nome(q, ctx)
    with ctx.workprec():
        if nome.sign < 0:
            raise DomainError("G-series route needs a positive nome")
        if nome.magnitude > qseries.q_boundary(family, ctx) * (1 + ctx.eps * 16):
            raise DomainError(f"nome {mp.nstr(nome.magnitude, 8)} outside the f{family} domain")
        qv = nome.value
        value = (to_mpf(c1) * qseries.g_series(qv, ctx)
                 + to_mpf(cj) * qseries.g_series(qv ** j, ctx))
        s = qseries.s_value(family, qv, ctx)
    return MeasureResult(value, "gseries", ctx.eps * 8 * (1 + abs(value)), s)


def f_at_k(family: int, k, ctx) -> MeasureResult:
    """Best available route; when both routes apply they must agree."""
    ctx = as_context(ctx)
    kx = _exact(k)
    with ctx.workprec():
        kv = to_mpf(kx if kx is not None else k)
    if family == 3 and kv == 0:
        return MeasureResult(mpf(0), "trivial(f3(0)=0)", mpf(0))
    threshold = HYPER_ROUTE[family][0]
    results = []
    if kv >= S_BOUNDARY[family]:
        nome = qseries.invert_s(family, kx if kx is not None else kv, ctx)
        results.append(f_gseries(family, nome, ctx))
    if abs(kv) >= threshold:
        results.append(f_hyper(family, k, ctx))
    if not results:
        raise UnroutableError(f"f{family}({k}) is outside both the hypergeometric and G-series domains")
    if len(results) == 2:
        a, b = results
        with ctx.workprec():
            diff = abs(a.value - b.value)
            tol = max(a.error_estimate + b.error_estimate,
                      mpf(10) ** (-min(ctx.target_digits, _route_digits(b, ctx))))
            tol *= max(1, abs(a.value))
            if diff > tol:
                raise RouteDisagreement(
                    f"f{family}({k}): gseries {mp.nstr(a.value, 20)} vs hyper {mp.nstr(b.value, 20)}")
        return MeasureResult(a.value, f"{a.route}+{b.route}", max(a.error_estimate, diff), a.s_value)
    return results[0]


def _route_digits(res: MeasureResult, ctx) -> int:
    if res.route.startswith("hyper-unit"):
        return 8
    return ctx.target_digits


def qk_arguments(z) -> tuple[Fraction, Fraction]:
    z = Fraction(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    return (16 - z) ** 3 / z ** 2, -((4 - z) ** 3) / z


def qk_mahler(z, ctx) -> MeasureResult:
    """m(Q_{z-4}) = -f3((16-z)^3/z^2)/15 + 8 f3(-(4-z)^3/z)/15 for z <= -32 or z >= 16.

    Continuing in from |z| = oo, the first argument touches the branch point 108 at
    z = -32 and the second reaches it at z = 16; in between the combination is routable
    at some z (e.g. -2, 4) but no longer equals the Mahler measure.
    """
    ctx = as_context(ctx)
    k1, k2 = qk_arguments(z)
    if -32 < Fraction(z) < 16:
        raise UnroutableError(f"Q_k at z={z}: the f3 composition is valid only for z <= -32 or z >= 16")
    parts = []
    for name, k in (("first", k1), ("second", k2)):
        try:
            parts.append(f_at_k(3, k, ctx))
        except (UnroutableError, qseries.BracketError, DomainError) as exc:
            raise UnroutableError(f"Q_k at z={z}: {name} f3 argument {k} unroutable ({exc})") from exc
    with ctx.workprec():
        value = -parts[0].value / 15 + 8 * parts[1].value / 15
        err = parts[0].error_estimate / 15 + 8 * parts[1].error_estimate / 15
    return MeasureResult(value, f"qk-composition[{parts[0].route};{parts[1].route}]", err)


def smyth_jensen(ctx) -> MeasureResult:
    """m(x+y+1) = int_0^1 log+|1 + e^{2 pi i t}| dt by Jensen's formula in y."""
    ctx = as_context(ctx)
    with ctx.workprec():
        val = 2 * mp.quad(lambda t: mp.log(2 * mp.cos(mp.pi * t)), [0, mpf(1) / 3])
    return MeasureResult(val, "jensen-quadrature", ctx.eps * 16)


# ---------------------------------------------------------------------------
# quasi-Monte Carlo torus integration


@dataclass(frozen=True)
class PolyInstance:
    family: str  # f2 | f3 | f4 | qk | smyth
    k: float = 0.0
    root_sign: int = 1  # which branch of k^(1/2) or k^(1/4)

    @property
    def dim(self) -> int:
        return 2 if self.family == "smyth" else 3

    @property
    def prefactor(self) -> float:
        return {"f2": 2.0, "f4": 4.0}.get(self.family, 1.0)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@lru_cache(maxsize=16)
def korobov_vector(n_points: int, dim: int) -> tuple[int, ...]:
    """Generating vector (1, a, a^2, ...) mod N chosen by the P_2 figure of merit."""
    rng = np.random.default_rng(12345)
    cands = rng.integers(2, n_points - 1, size=48)
    j = np.arange(n_points)
    best, best_a = None, 2
    for a in cands:
        z = [pow(int(a), d, n_points) for d in range(dim)]
        prod = np.ones(n_points)
        for zd in z:
            x = (j * zd % n_points) / n_points
            prod *= 1 + 2 * math.pi ** 2 * (x * x - x + 1 / 6)
        merit = prod.mean() - 1
        if best is None or merit < best:
            best, best_a = merit, int(a)
    return tuple(pow(best_a, d, n_points) for d in range(dim))


def _log_abs_poly(inst: PolyInstance, theta: np.ndarray) -> np.ndarray:
    two_pi = 2 * np.pi
    if inst.family == "smyth":
        x = np.exp(1j * two_pi * theta[:, 0])
        y = np.exp(1j * two_pi * theta[:, 1])
        return np.log(np.abs(1 + x + y))
    a, b, c = (two_pi * theta[:, i] for i in range(3))
    if inst.family == "f2":
        root = inst.root_sign * np.sqrt(complex(inst.k))
        val = 8 * np.cos(a) * np.cos(b) * np.cos(c) + root
    elif inst.family == "f3":
        z = np.exp(1j * c)
        val = 16 * np.cos(a) ** 2 * np.cos(b) ** 2 * (1 + z) ** 3 / z ** 2 - inst.k
    elif inst.family == "f4":
        x, y, z = np.exp(1j * a), np.exp(1j * b), np.exp(1j * c)
        root = inst.root_sign * complex(inst.k) ** 0.25
        val = x ** 4 + y ** 4 + z ** 4 + 1 + root * x * y * z
    elif inst.family == "qk":
        # twelve monomials: x, y, z, xy, yz, xyz and their inverses (no xz term)
        val = 2 * (np.cos(a) + np.cos(b) + np.cos(c) + np.cos(a + b) + np.cos(b + c)
                   + np.cos(a + b + c)) - inst.k
    else:
        raise ValueError(f"unknown family {inst.family}")
    return np.log(np.abs(val))


def _integrand(inst: PolyInstance, theta: np.ndarray) -> np.ndarray:
    vals = _log_abs_poly(inst, theta)
    bad = ~np.isfinite(vals)
    tries = 0
    while bad.any():
        # deterministic jitter off the measure-zero zero set
        tries += 1
        theta[bad] = (theta[bad] + 1e-9 * tries * (1 + np.arange(theta.shape[1]) * 0.618)) % 1.0
        vals[bad] = _log_abs_poly(inst, theta[bad])
        bad = ~np.isfinite(vals)
    return vals


def mahler_integral(inst: PolyInstance, samples: int = 10 ** 7, seed: int = 0,
                    batches: int = 16, chunk: int = 1 << 20) -> MeasureResult:
    """Randomly shifted rank-1 lattice rule, median of the batch means."""
    if samples < 10 ** 4:
        raise ValueError("samples must be >= 10^4")
    n_points = samples // batches
    while not _is_prime(n_points):
        n_points -= 1
    gen = np.array(korobov_vector(n_points, inst.dim), dtype=np.int64)
    means = []
    for b in range(batches):
        rng = np.random.default_rng([seed, b])
        shift = rng.random(inst.dim)
        acc = 0.0
        for start in range(0, n_points, chunk):
            j = np.arange(start, min(start + chunk, n_points), dtype=np.int64)
            theta = ((j[:, None] * gen[None, :]) % n_points) / n_points
            theta = (theta + shift) % 1.0
            acc += math.fsum(_integrand(inst, theta))
        means.append(acc / n_points)
    means = np.array(means) * inst.prefactor
    value = float(np.median(means))
    err = 1.2533 * float(np.std(means, ddof=1)) / math.sqrt(batches)
    return MeasureResult(mpf(value), f"integral(qmc,N={n_points}x{batches},seed={seed})", mpf(err))
