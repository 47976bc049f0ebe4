"""Identity registry, digit-agreement certificates and coefficient-file ingestion.

Each identity is a pair of linear combinations of evaluable terms.  A term is
coefficient * sqrt(radicand) * pi^pi_power * quantity, with the coefficient an
exact rational.  The left side is built from the Mahler-measure and
hypergeometric routes, the right side from lattice sums and L-values, so the
two sides share nothing above the numerical kernel.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf

from . import hyper, lattice, lseries, mahler, qseries
from .lseries import InsufficientCoefficients, NewformSpec
from .numkernel import PrecisionContext, PrecisionUnreachable, riemann_zeta, to_mpf
from .qseries import CMPoint

REPORT_FIELDS = ("id", "status", "digits_agreed", "target_digits", "lhs", "rhs", "lhs_method",
                 "rhs_method", "runtime_ms", "working_bits", "paper_anchor")


class CoeffFileError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class HeckeWarning(UserWarning):
    pass


class MissingForm(LookupError):
    pass


# ---------------------------------------------------------------------------
# terms and identities


@dataclass(frozen=True)
class Term:
    """coeff * sqrt(radicand) * pi^pi_power * <kind(arg)>.

    kinds:
      f_gs      (family, CMPoint)     Mahler measure via the G-series at tau
      f         (family, k)           Mahler measure, best route
      pfq       HyperParams           5F4 value (Levin-u when |x| = 1)
      qk        z                     m(Q_{z-4}) from two f3 values
      smyth     None                  m(x+y+1) via Jensen's formula
      s         (family, CMPoint)     s_family(q(tau))
      integral  PolyInstance          quasi-Monte Carlo estimate
      lp0       label                 L'(form, 0)
      l3        label                 L(form, 3)
      lpchi     D                     L'(chi_D, -1)
      lchi      (D, s)                L(chi_D, s); D = 1 means zeta(s)
      lprod     (s, (D1, D2, ...))    product of L(chi_Di, s)
      epstein   ((a,b,c), t)          lattice sum sum' Q(m,n)^-t
      ek        (family, CMPoint)     Eisenstein-Kronecker double sum
      log       rational              log of a positive rational
      const     None                  1
    """

    coeff: Fraction
    kind: str
    arg: object = None
    radicand: int = 1
    pi_power: int = 0


def T(coeff, kind, arg=None, radicand=1, pi_power=0) -> Term:
    return Term(Fraction(coeff), kind, arg, radicand, pi_power)


# quantities computed in double precision or by sampling
_LOW_PRECISION = {"epstein": 15, "ek": 15, "integral": 15}


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    group: str
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]
    anchor: str
    status: str = "proved"  # proved | conjectural
    default_digits: int = 25
    max_digits: int | None = None  # acceleration- or sampling-limited identities

    def forms(self) -> set[str]:
        return {t.arg for t in self.lhs + self.rhs if t.kind in ("lp0", "l3")}

    def effective_digits(self, target: int | None) -> int:
        d = self.default_digits if target is None else target
        return d if self.max_digits is None else min(d, self.max_digits)


def _tau(m, den) -> CMPoint:
    return CMPoint.sqrt_neg(m, den)


FAMILY_PARAMS = {2: hyper.F2_PARAMS, 3: hyper.F3_PARAMS, 4: hyper.F4_PARAMS}


def _lp(coeff, label):
    return T(coeff, "lp0", label)


def _lc(coeff, D):
    return T(coeff, "lpchi", D)


def _build_registry() -> tuple[IdentitySpec, ...]:
    out = []
    add = out.append

    # Mahler measures at CM points against newform and Dirichlet L-values
    main = [
        ("A64", 2, (1, 2), 64, [_lp(8, "h")],
         [T(128, "l3", "h", pi_power=-3)], "f_2(64) = 8 L'(h,0)"),
        ("A256", 2, (3, 2), 256, [_lp(Fraction(4, 3), "g48"), _lc(Fraction(8, 3), -4)],
         [T(64, "l3", "g48", 3, -3), T(Fraction(16, 3), "lchi", (-4, 2), pi_power=-1)],
         "f_2(256) = 4/3 (L'(g48,0) + 2 L'(chi_-4,-1))"),
        ("A216", 3, (6, 3), 216, [_lp(Fraction(15, 4), "g24_1"), _lc(Fraction(15, 4), -3)],
         [T(45, "l3", "g24_1", 6, -3), T(Fraction(45, 16), "lchi", (-3, 2), 3, -1)],
         "f_3(216) = 15/4 (L'(g24_1,0) + L'(chi_-3,-1))"),
        ("A1458", 3, (12, 3), 1458, [_lp(Fraction(135, 8), "g"), _lc(Fraction(15, 4), -4)],
         [T(Fraction(405, 4), "l3", "g", 3, -3), T(Fraction(15, 2), "lchi", (-4, 2), pi_power=-1)],
         "f_3(1458) = 15/8 (9 L'(g,0) + 2 L'(chi_-4,-1))"),
        ("A648", 4, (4, 2), 648, [_lp(10, "h"), _lc(Fraction(5, 2), -4)],
         [T(160, "l3", "h", pi_power=-3), T(5, "lchi", (-4, 2), pi_power=-1)],
         "f_4(648) = 5/2 (4 L'(h,0) + L'(chi_-4,-1))"),
        ("A2304", 4, (6, 2), 2304, [_lp(Fraction(20, 3), "g24_2"), _lc(Fraction(20, 3), -3)],
         [T(80, "l3", "g24_2", 6, -3), T(5, "lchi", (-3, 2), 3, -1)],
         "f_4(2304) = 20/3 (L'(g24_2,0) + L'(chi_-3,-1))"),
        ("A20736", 4, (10, 2), 20736, [_lp(4, "g40"), _lc(Fraction(8, 5), -8)],
         [T(80, "l3", "g40", 10, -3), T(Fraction(32, 5), "lchi", (-8, 2), 2, -1)],
         "f_4(20736) = 4/5 (5 L'(g40,0) + 2 L'(chi_-8,-1))"),
        ("A614656", 4, (18, 2), 614656, [_lp(Fraction(200, 3), "f"), _lc(Fraction(40, 3), -3)],
         [T(Fraction(800, 3), "l3", "f", 2, -3), T(10, "lchi", (-3, 2), 3, -1)],
         "f_4(614656) = 40/3 (5 L'(f,0) + L'(chi_-3,-1))"),
    ]
    for ident, fam, (m, den), k, rhs, rhs_l3, anchor in main:
        lhs = (T(1, "f_gs", (fam, _tau(m, den))),)
        add(IdentitySpec(ident, "cm", lhs, tuple(rhs), anchor, default_digits=30))
        add(IdentitySpec(ident + "-L3", "cm-l3", lhs, tuple(rhs_l3),
                         anchor.split(" = ")[0] + " as L(f,3) and L(chi,2) values", default_digits=30))

    # the ten CM values of the s-functions
    for fam, (m, den), k in [(2, (1, 2), 64), (2, (3, 2), 256), (3, (3, 3), 108), (3, (6, 3), 216),
                             (3, (12, 3), 1458), (4, (2, 2), 256), (4, (4, 2), 648),
                             (4, (6, 2), 2304), (4, (10, 2), 20736), (4, (18, 2), 614656)]:
        add(IdentitySpec(f"SV-s{fam}-{k}", "svalue", (T(1, "s", (fam, _tau(m, den))),),
                         (T(k, "const"),), f"s_{fam}(q(sqrt(-{m})/{den})) = {k}", default_digits=30))

    # 5F4 values at rational points
    log2, log3 = Fraction(2), Fraction(3)
    cor = [
        ("C13-1", 2, Fraction(1), [T(48, "log", log2), _lp(-64, "h")], 8,
         "5F4(3/2,3/2,3/2,1,1;2,2,2,2;1) = 48 log 2 - 64 L'(h,0)"),
        ("C13-2", 2, Fraction(1, 4), [T(256, "log", log2), _lp(Fraction(-128, 3), "g48"),
                                      _lc(Fraction(-256, 3), -4)], None,
         "5F4(3/2,3/2,3/2,1,1;2,2,2,2;1/4) = 256 log 2 - 128/3 (L'(g48,0) + 2 L'(chi_-4,-1))"),
        ("C13-3", 3, Fraction(1, 2), [T(54, "log", Fraction(6)), _lp(Fraction(-135, 2), "g24_1"),
                                      _lc(Fraction(-135, 2), -3)], None,
         "5F4(4/3,3/2,5/3,1,1;2,2,2,2;1/2) = 54 log 6 - 135/2 (L'(g24_1,0) + L'(chi_-3,-1))"),
        ("C13-4", 3, Fraction(2, 27), [T(Fraction(243, 2), "log", log2), T(729, "log", log3),
                                       _lp(Fraction(-3645 * 9, 16), "g"),
                                       _lc(Fraction(-3645, 8), -4)], None,
         "5F4(4/3,3/2,5/3,1,1;2,2,2,2;2/27) = 243/2 log 2 + 729 log 3"
         " - 3645/16 (9 L'(g,0) + 2 L'(chi_-4,-1))"),
        ("C13-5", 4, Fraction(32, 81), [T(81, "log", log2), T(108, "log", log3),
                                        _lp(-270, "h"), _lc(Fraction(-135, 2), -4)], None,
         "5F4(5/4,3/2,7/4,1,1;2,2,2,2;32/81) = 81 log 2 + 108 log 3"
         " - 135/2 (4 L'(h,0) + L'(chi_-4,-1))"),
        ("C13-6", 4, Fraction(1, 9), [T(768, "log", log2), T(192, "log", log3),
                                      _lp(-640, "g24_2"), _lc(-640, -3)], None,
         "5F4(5/4,3/2,7/4,1,1;2,2,2,2;1/9) = 768 log 2 + 192 log 3"
         " - 640 (L'(g24_2,0) + L'(chi_-3,-1))"),
        ("C13-7", 4, Fraction(1, 81), [T(6912, "log", log2), T(3456, "log", log3),
                                       _lp(-3456, "g40"), _lc(Fraction(-6912, 5), -8)], None,
         "5F4(5/4,3/2,7/4,1,1;2,2,2,2;1/81) = 6912 log 2 + 3456 log 3"
         " - 3456/5 (5 L'(g40,0) + 2 L'(chi_-8,-1))"),
        ("C13-8", 4, Fraction(1, 2401), [T(Fraction(614656, 3), "log", log2),
                                         T(Fraction(307328, 3), "log", Fraction(7)),
                                         _lp(Fraction(-3073280 * 5, 9), "f"),
                                         _lc(Fraction(-3073280, 9), -3)], None,
         "5F4(5/4,3/2,7/4,1,1;2,2,2,2;1/2401) = 614656/3 log 2 + 307328/3 log 7"
         " - 3073280/9 (5 L'(f,0) + L'(chi_-3,-1))"),
    ]
    for ident, fam, x, rhs, cap, anchor in cor:
        add(IdentitySpec(ident, "pfq", (T(1, "pfq", FAMILY_PARAMS[fam].at(x)),), tuple(rhs), anchor,
                         default_digits=25 if cap is None else cap, max_digits=cap))

    add(IdentitySpec("T1-hyperI", "pfq-unit", (T(1, "pfq", FAMILY_PARAMS[4].at(1)),),
                     (T(Fraction(256, 3), "log", log2), T(Fraction(-5120, 3), "l3", "f", 2, -3)),
                     "5F4(5/4,3/2,7/4,1,1;2,2,2,2;1) = 256/3 log 2 - 5120 sqrt(2)/(3 pi^3) L(f,3)",
                     default_digits=8, max_digits=8))
    add(IdentitySpec("T1-hyperII", "pfq-unit", (T(1, "pfq", FAMILY_PARAMS[3].at(1)),),
                     (T(18, "log", log2), T(27, "log", log3), T(-810, "l3", "g", 3, -3)),
                     "5F4(4/3,3/2,5/3,1,1;2,2,2,2;1) = 18 log 2 + 27 log 3 - 810 sqrt(3)/pi^3 L(g,3)",
                     default_digits=8, max_digits=8))

    # transformations between unit and rational arguments
    tr = [
        ("TR-1", 4, [T(Fraction(3, 12005), "pfq", FAMILY_PARAMS[4].at(Fraction(1, 2401))),
                     T(Fraction(512, 15), "log", log2), T(Fraction(-128, 5), "log", Fraction(7)),
                     _lc(Fraction(256, 3), -3)],
         "5F4(5/4,..;1) = 3/12005 5F4(5/4,..;1/2401) + 512/15 log 2 - 128/5 log 7"
         " + 256/3 L'(chi_-3,-1)"),
        ("TR-2", 3, [T(Fraction(16, 243), "pfq", FAMILY_PARAMS[3].at(Fraction(2, 27))),
                     T(10, "log", log2), T(-21, "log", log3), _lc(30, -4)],
         "5F4(4/3,..;1) = 16/243 5F4(4/3,..;2/27) + 10 log 2 - 21 log 3 + 30 L'(chi_-4,-1)"),
        ("TR-3", 2, [T(Fraction(32, 135), "pfq", FAMILY_PARAMS[4].at(Fraction(32, 81))),
                     T(Fraction(144, 5), "log", log2), T(Fraction(-128, 5), "log", log3),
                     _lc(16, -4)],
         "5F4(3/2,..;1) = 32/135 5F4(5/4,..;32/81) + 144/5 log 2 - 128/5 log 3"
         " + 16 L'(chi_-4,-1)"),
    ]
    for ident, fam, rhs, anchor in tr:
        add(IdentitySpec(ident, "transform", (T(1, "pfq", FAMILY_PARAMS[fam].at(1)),), tuple(rhs), anchor,
                         default_digits=8, max_digits=8))

    # the Q_k family
    add(IdentitySpec("R1", "qk", (T(1, "f", (3, 108)),), (_lp(15, "g"),), "f_3(108) = 15 L'(g,0)"))
    add(IdentitySpec("CP1-a", "qk", (T(1, "qk", -32),), (_lp(8, "g"), _lc(2, -4)),
                     "m(Q_-36) = 2 (4 L'(g,0) + L'(chi_-4,-1))"))
    # m(Q_-6) = (2 m(Q_-36) - m(Q_0)) / 4 and m(Q_0) = m(Q_12) / 4
    add(IdentitySpec("CP1-b", "qk", (T(Fraction(1, 2), "qk", -32), T(Fraction(-1, 16), "qk", 16)),
                     (_lp(Fraction(7, 2), "g"), _lc(1, -4)),
                     "m(Q_-6) = 1/2 (7 L'(g,0) + 2 L'(chi_-4,-1))"))
    add(IdentitySpec("B31", "qk", (T(2, "qk", -32),), (_lp(16, "g"), _lc(4, -4)),
                     "2 m(Q_-36) = 4 m(Q_-6) + m(Q_0) with the closed forms of m(Q_-6), m(Q_0)"))
    add(IdentitySpec("B32", "qk", (T(Fraction(1, 4), "qk", 16),), (T(12, "l3", "g", 3, -3),),
                     "m(Q_0) = 12 sqrt(3)/pi^3 L(g,3) = 2 L'(g,0), with m(Q_0) = m(Q_12)/4"))
    add(IdentitySpec("B33", "qk", (T(1, "qk", 16),), (_lp(8, "g"),),
                     "m(Q_12) = 4 m(Q_0) = 8 L'(g,0)"))

    add(IdentitySpec("SMYTH", "smyth", (T(1, "smyth"),), (_lc(1, -3),),
                     "m(x+y+1) = L'(chi_-3,-1)", default_digits=30))

    # numerically observed formulas whose forms must be supplied as coefficient files
    conj = [
        ("S4-f2m64", 2, -64, [_lp(2, "g32"), _lc(2, -4)],
         "f_2(-64) = 2 (L'(g32,0) + L'(chi_-4,-1))"),
        ("S4-f2m512", 2, -512, [_lp(1, "g64"), _lc(1, -8)],
         "f_2(-512) = L'(g64,0) + L'(chi_-8,-1)"),
        ("S4-f4m1024", 4, -1024, [_lp(8, "g20"), _lc(Fraction(16, 5), -4)],
         "f_4(-1024) = 8/5 (5 L'(g20,0) + 2 L'(chi_-4,-1))"),
        ("S4-f4m12288", 4, -12288, [_lp(Fraction(40, 9), "g36"), _lc(Fraction(80, 9), -3)],
         "f_4(-12288) = 40/9 (L'(g36,0) + 2 L'(chi_-3,-1))"),
        ("S4-f4m82944", 4, -82944, [_lp(Fraction(40, 13), "g52"), _lc(Fraction(80, 13), -4)],
         "f_4(-82944) = 40/13 (L'(g52,0) + 2 L'(chi_-4,-1))"),
    ]
    for ident, fam, k, rhs, anchor in conj:
        add(IdentitySpec(ident, "conjectural", (T(1, "f", (fam, k)),), tuple(rhs), anchor,
                         status="conjectural", default_digits=20))

    # Dirichlet factorizations of differences of lattice sums at t = 2
    lattice_factor = [
        # 2 (1 - 3/4 + 2/16) = 3/4 at t = 2
        ("LF-1", [T(Fraction(3, 4), "lprod", (2, (1, -4)))], (1, 0, 4), (2, 0, 2),
         "2 (1 - 3/2^t + 2/2^2t) zeta(t) L(chi_-4,t) = S(1,0,4;t) - S(2,0,2;t)"),
        ("LF-2", [T(2, "lprod", (2, (8, -3)))], (1, 0, 6), (2, 0, 3),
         "2 L(chi_8,t) L(chi_-3,t) = S(1,0,6;t) - S(2,0,3;t)"),
        ("LF-3", [T(2, "lprod", (2, (5, -8)))], (1, 0, 10), (2, 0, 5),
         "2 L(chi_5,t) L(chi_-8,t) = S(1,0,10;t) - S(2,0,5;t)"),
        ("LF-4", [T(2, "lprod", (2, (12, -4)))], (1, 0, 12), (3, 0, 4),
         "2 L(chi_12,t) L(chi_-4,t) = S(1,0,12;t) - S(3,0,4;t)"),
        ("LF-5", [T(2, "lprod", (2, (24, -3)))], (1, 0, 18), (2, 0, 9),
         "2 L(chi_24,t) L(chi_-3,t) = S(1,0,18;t) - S(2,0,9;t)"),
    ]
    for ident, lhs, q1, q2, anchor in lattice_factor:
        add(IdentitySpec(ident, "lattice", tuple(lhs),
                         (T(1, "epstein", (q1, 2)), T(-1, "epstein", (q2, 2))), anchor,
                         default_digits=8, max_digits=8))

    # G-series against the Eisenstein-Kronecker double sums
    for ident, fam, (m, den) in [("EK-f2-a", 2, (1, 2)), ("EK-f2-b", 2, (3, 2)),
                                 ("EK-f3-a", 3, (3, 3)), ("EK-f3-b", 3, (6, 3)),
                                 ("EK-f4-a", 4, (2, 2))]:
        tau = _tau(m, den)
        add(IdentitySpec(ident, "ek", (T(1, "f_gs", (fam, tau)),), (T(1, "ek", (fam, tau)),),
                         f"f_{fam}(s_{fam}(q)) as an Eisenstein-Kronecker sum at tau = {tau}",
                         default_digits=4, max_digits=4))

    # direct torus integration against closed forms
    integ = [
        ("INT-SMYTH", mahler.PolyInstance("smyth"), [_lc(1, -3)], 3, "m(x+y+1) = L'(chi_-3,-1)"),
        ("INT-f2-64", mahler.PolyInstance("f2", 64), [_lp(8, "h")], 2, "f_2(64) = 8 L'(h,0)"),
        ("INT-Q0", mahler.PolyInstance("qk", 0), [_lp(2, "g")], 2, "m(Q_0) = 2 L'(g,0)"),
        ("INT-Q-6", mahler.PolyInstance("qk", -6), [_lp(Fraction(7, 2), "g"), _lc(1, -4)], 2,
         "m(Q_-6) = 1/2 (7 L'(g,0) + 2 L'(chi_-4,-1))"),
    ]
    for ident, inst, rhs, cap, anchor in integ:
        add(IdentitySpec(ident, "integral", (T(1, "integral", inst),), tuple(rhs), anchor,
                         default_digits=cap, max_digits=cap))
    return tuple(out)


@lru_cache(maxsize=1)
def registry() -> tuple[IdentitySpec, ...]:
    return _build_registry()


def get_identity(ident: str) -> IdentitySpec:
    for spec in registry():
        if spec.id == ident:
            return spec
    raise KeyError(f"unknown identity {ident!r}")


def select(filter_: str | None) -> list[IdentitySpec]:
    """Identities whose id, group or status matches the filter (all when None)."""
    specs = list(registry())
    if not filter_:
        return specs
    f = filter_.lower()
    return [s for s in specs if s.group.lower() == f or s.status == f or s.id.lower() == f
            or s.id.lower().startswith(f + "-")]


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class Options:
    forms: dict[str, NewformSpec] = field(default_factory=dict)  # ingested forms by label
    timing: bool = True  # runtime_ms = 0 when False, for byte-identical reports
    qmc_samples: int = 10 ** 7
    qmc_seed: int = 0


@dataclass(frozen=True)
class VerificationReport:
    id: str
    status: str
    digits_agreed: int
    target_digits: int
    lhs: str
    rhs: str
    lhs_method: str
    rhs_method: str
    runtime_ms: int
    working_bits: int
    paper_anchor: str

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _resolve_form(label: str, options: Options) -> NewformSpec:
    if label in options.forms:
        return options.forms[label]
    builtin = _builtin_forms()
    if label in builtin:
        return builtin[label]
    raise MissingForm(label)


@lru_cache(maxsize=1)
def _builtin_forms() -> dict[str, NewformSpec]:
    return lseries.builtin_forms()


def _quantity(term: Term, ctx: PrecisionContext, options: Options) -> tuple[mpf, str]:
    kind, arg = term.kind, term.arg
    if kind == "f_gs":
        fam, tau = arg
        r = mahler.f_gseries(fam, tau, ctx)
        return r.value, f"f{fam}:gseries"
    if kind == "f":
        fam, k = arg
        r = mahler.f_at_k(fam, k, ctx)
        return r.value, f"f{fam}:{r.route}"
    if kind == "pfq":
        if abs(arg.x) == 1:
            r = hyper.pfq_unit(arg, ctx.target_digits)
            return r.value, f"pfq:levin-u(order={r.order})"
        return hyper.pfq(arg, ctx), "pfq:series"
    if kind == "qk":
        r = mahler.qk_mahler(arg, ctx)
        return r.value, f"qk:{r.route}"
    if kind == "smyth":
        r = mahler.smyth_jensen(ctx)
        return r.value, r.route
    if kind == "s":
        fam, tau = arg
        return qseries.s_value(fam, tau.nome(ctx), ctx), f"s{fam}:eta-product"
    if kind == "integral":
        r = mahler.mahler_integral(arg, options.qmc_samples, options.qmc_seed)
        return r.value, r.route
    if kind == "lp0":
        r = lseries.newform_lprime0(_resolve_form(arg, options), ctx)
        return r.value, f"L'({arg},0):{r.method}"
    if kind == "l3":
        r = lseries.newform_l3(_resolve_form(arg, options), ctx)
        return r.value, f"L({arg},3):{r.method}"
    if kind == "lpchi":
        r = lseries.dirichlet_lprime_minus1(arg, ctx)
        return r.value, f"L'(chi_{arg},-1):{r.method}"
    if kind == "lchi":
        D, s = arg
        if D == 1:
            return riemann_zeta(s, ctx), f"zeta({s}):hurwitz"
        r = lseries.dirichlet_l(D, s, ctx)
        return r.value, f"L(chi_{D},{s}):{r.method}"
    if kind == "lprod":
        s, chars = arg
        value = mpf(1)
        for D in chars:
            v, _ = _quantity(Term(Fraction(1), "lchi", (D, s)), ctx, options)
            with ctx.workprec():
                value *= v
        return value, "dirichlet-product:hurwitz"
    if kind == "epstein":
        (a, b, c), t = arg
        r = lattice.epstein_sum(lattice.QuadForm(a, b, c), t)
        return mpf(r.value), f"epstein({a},{b},{c}):shell(K={r.K})"
    if kind == "ek":
        fam, tau = arg
        r = lseries.eisenstein_kronecker(tau, fam)
        return r.value, r.method
    if kind == "log":
        with ctx.workprec():
            return mp.log(to_mpf(Fraction(arg))), "log"
    if kind == "const":
        return mpf(1), "exact"
    raise ValueError(f"unknown term kind {kind}")


def _evaluate(terms, ctx, options) -> tuple[mpf, str, int]:
    """(value, method tags, decimal digits supported by the lowest-precision term)."""
    total = mpf(0)
    methods = []
    limit = ctx.target_digits + 1000
    for term in terms:
        value, method = _quantity(term, ctx, options)
        with ctx.workprec():
            c = to_mpf(term.coeff)
            if term.radicand != 1:
                c *= mp.sqrt(term.radicand)
            if term.pi_power:
                c *= mp.pi ** term.pi_power
            total += c * value
        if method not in methods:
            methods.append(method)
        limit = min(limit, _LOW_PRECISION.get(term.kind, limit))
    return total, "+".join(methods), limit


def digits_agreed(lhs, rhs, ctx: PrecisionContext, limit: int | None = None) -> int:
    """floor(-log10(|lhs - rhs| / max(1, |lhs|))).

    Capped at the target plus half the guard band: digits deeper than that sit in
    rounding noise and are not certified.
    """
    cap = min(int(ctx.working_bits * math.log10(2)),
              ctx.target_digits + int(ctx.guard_bits * math.log10(2) / 2))
    if limit is not None:
        cap = min(cap, limit)
    with ctx.workprec():
        diff = abs(lhs - rhs)
        if diff == 0:
            return cap
        rel = diff / max(mpf(1), abs(lhs))
        return max(0, min(cap, int(mp.floor(-mp.log10(rel)))))


def run_identity(ident: str, target_digits: int | None = None,
                 options: Options | None = None) -> VerificationReport:
    options = options or Options()
    spec = get_identity(ident)
    target = spec.effective_digits(target_digits)
    ctx = PrecisionContext(target)
    start = time.perf_counter()
    try:
        missing = [label for label in sorted(spec.forms())
                   if label not in options.forms and label not in _builtin_forms()]
        if missing:
            return _report(spec, "conditional-skipped", 0, target, "", "",
                           f"missing coefficients for {','.join(missing)}", "", 0, ctx, options)
        lhs, lhs_method, lhs_limit = _evaluate(spec.lhs, ctx, options)
        rhs, rhs_method, rhs_limit = _evaluate(spec.rhs, ctx, options)
    except InsufficientCoefficients as exc:
        return _report(spec, "conditional-skipped", 0, target, "", "", str(exc), "",
                       0, ctx, options)
    except PrecisionUnreachable as exc:
        raise type(exc)(f"{ident}: {exc}") from exc
    digits = digits_agreed(lhs, rhs, ctx, min(lhs_limit, rhs_limit))
    status = "verified" if digits >= target else "failed"
    elapsed = int(round((time.perf_counter() - start) * 1000))
    show = int(ctx.working_bits * math.log10(2))
    with ctx.workprec():
        lhs_s, rhs_s = mp.nstr(lhs, show), mp.nstr(rhs, show)
    return _report(spec, status, digits, target, lhs_s, rhs_s, lhs_method, rhs_method,
                   elapsed, ctx, options)


def reproduced_digits(report: VerificationReport, options: Options | None = None) -> tuple[int, int]:
    """Digits of the reported lhs and rhs strings confirmed by a doubled-precision recomputation."""
    options = options or Options()
    spec = get_identity(report.id)
    ctx = PrecisionContext(report.target_digits).doubled()
    out = []
    for terms, shown in ((spec.lhs, report.lhs), (spec.rhs, report.rhs)):
        value, _, limit = _evaluate(terms, ctx, options)
        with ctx.workprec():
            out.append(digits_agreed(value, mp.mpf(shown), ctx, limit))
    return out[0], out[1]


def _report(spec, status, digits, target, lhs, rhs, lm, rm, elapsed, ctx, options):
    return VerificationReport(spec.id, status, digits, target, lhs, rhs, lm, rm,
                              elapsed if options.timing else 0, ctx.working_bits, spec.anchor)


def _run_one(args):
    ident, target, options = args
    try:
        return run_identity(ident, target, options), None
    except Exception as exc:  # reported per identity, aggregated by run_all
        return None, f"{ident}: {type(exc).__name__}: {exc}"


def run_all(target_digits: int | None = None, filter_: str | None = None,
            options: Options | None = None, workers: int = 1):
    """Run the selected identities.  Returns (reports, errors, exit code)."""
    options = options or Options()
    specs = select(filter_)
    jobs = [(s.id, target_digits, options) for s in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    reports, errors = [], []
    for (report, err), spec in zip(results, specs):
        if err is not None:
            errors.append(err)
            report = VerificationReport(spec.id, "failed", 0, spec.effective_digits(target_digits),
                                        "", "", "", err, 0, 0, spec.anchor)
        reports.append(report)
    code = 1 if any(r.status == "failed" for r in reports) else 0
    return reports, errors, code


# ---------------------------------------------------------------------------
# coefficient files


def _hecke_violations(a, limit: int = 100) -> list[tuple[int, int]]:
    bad = []
    for k in range(2, limit + 1):
        for m in range(k + 1, limit // k + 1):
            if math.gcd(k, m) == 1 and k * m < len(a) and a[k] * a[m] != a[k * m]:
                bad.append((k, m))
    return bad


def parse_coeff_text(text: str, path="<string>") -> NewformSpec:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise CoeffFileError(path, 1, "header '# label N 3 D epsilon' expected")
    head = lines[0][1:].split()
    if len(head) < 5:
        raise CoeffFileError(path, 1, "header needs label, level, weight, character and sign")
    label = head[0]
    try:
        N, weight, D, eps = (int(x) for x in head[1:5])
    except ValueError:
        raise CoeffFileError(path, 1, "level, weight, character and sign must be integers") from None
    if weight != 3:
        raise CoeffFileError(path, 1, f"weight {weight} unsupported, expected 3")
    if eps not in (1, -1):
        raise CoeffFileError(path, 1, f"sign must be +1 or -1, got {eps}")
    if N < 1:
        raise CoeffFileError(path, 1, f"level must be positive, got {N}")
    note = " ".join(head[5:])
    coeffs = [0]
    for lineno, line in enumerate(lines[1:], start=2):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        parts = body.split()
        if len(parts) != 2:
            raise CoeffFileError(path, lineno, f"expected 'k a_k', got {body!r}")
        try:
            k, ak = int(parts[0]), int(parts[1])
        except ValueError:
            raise CoeffFileError(path, lineno, f"non-integer entry {body!r}") from None
        if k != len(coeffs):
            raise CoeffFileError(path, lineno, f"index {k} out of sequence, expected {len(coeffs)}")
        if k == 1 and ak != 1:
            raise CoeffFileError(path, lineno, f"a(1) must be 1, got {ak}")
        coeffs.append(ak)
    if len(coeffs) < 2:
        raise CoeffFileError(path, len(lines), "no coefficient rows")
    bad = _hecke_violations(coeffs)
    if bad:
        warnings.warn(f"{path}: a(k)a(l) != a(kl) for {len(bad)} coprime pairs, first {bad[0]}",
                      HeckeWarning, stacklevel=3)
    return NewformSpec(label, N, D, eps, "file", tuple(coeffs), note)


def ingest_coeffs(path) -> NewformSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_coeff_text(fh.read(), path)


def format_coeff_file(spec: NewformSpec, count: int) -> str:
    a = spec.coefficients(count)
    rows = [f"# {spec.label} {spec.level} 3 {spec.character} {spec.epsilon}"]
    rows += [f"{k} {a[k]}" for k in range(1, count + 1)]
    return "\n".join(rows) + "\n"
