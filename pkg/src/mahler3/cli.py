"""Command line: verify identities, evaluate quantities, export coefficients, integrate."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

from mpmath import mp

from . import hyper, lseries, mahler, qseries, verify
from .numkernel import DomainError, PrecisionContext, PrecisionUnreachable
from .qseries import CMPoint, Nome

QUANTITIES = ("L3", "Lprime0", "dirichlet", "pfq", "f2", "f3", "f4", "qk", "s2", "s3", "s4", "G")

EVAL_USAGE = """argument forms for --args:
  L3 LABEL | Lprime0 LABEL          built-in form label (f g h g48 g24_1 g24_2 g40)
  dirichlet D S                     L(chi_D, S)
  pfq UPPER LOWER X                 comma-separated rationals, e.g. 3/2,3/2,3/2,1,1 2,2,2,2 1/4
  f2 K | f3 K | f4 K                rational k
  qk Z                              m(Q_{Z-4})
  s2 Q | s3 Q | s4 Q | G Q          nome as a decimal, or tau=M/D for tau = sqrt(-M)/D
"""


class UsageError(Exception):
    pass


def _nome_arg(text: str, ctx):
    if text.startswith("tau="):
        spec = text[4:]
        m, _, den = spec.partition("/")
        return CMPoint.sqrt_neg(Fraction(m), Fraction(den or 1)).nome(ctx)
    with ctx.workprec():
        return Nome.from_value(mp.mpf(text))


def _need(args, n, quantity):
    if len(args) != n:
        raise UsageError(f"{quantity} takes {n} argument(s), got {len(args)}")


def evaluate(quantity: str, args: list[str], digits: int) -> tuple[object, str]:
    ctx = PrecisionContext(digits)
    forms = lseries.builtin_forms()
    if quantity in ("L3", "Lprime0"):
        _need(args, 1, quantity)
        if args[0] not in forms:
            raise UsageError(f"unknown form {args[0]!r}")
        fn = lseries.newform_l3 if quantity == "L3" else lseries.newform_lprime0
        r = fn(forms[args[0]], ctx)
        return r.value, r.method
    if quantity == "dirichlet":
        _need(args, 2, quantity)
        r = lseries.dirichlet_l(int(args[0]), int(args[1]), ctx)
        return r.value, r.method
    if quantity == "pfq":
        _need(args, 3, quantity)
        params = hyper.HyperParams(tuple(Fraction(a) for a in args[0].split(",")),
                                   tuple(Fraction(b) for b in args[1].split(",")), Fraction(args[2]))
        if abs(params.x) == 1:
            r = hyper.pfq_unit(params, digits)
            return r.value, f"levin-u(order={r.order})"
        return hyper.pfq(params, ctx), "series"
    if quantity in ("f2", "f3", "f4"):
        _need(args, 1, quantity)
        r = mahler.f_at_k(int(quantity[1]), Fraction(args[0]), ctx)
        return r.value, r.route
    if quantity == "qk":
        _need(args, 1, quantity)
        r = mahler.qk_mahler(Fraction(args[0]), ctx)
        return r.value, r.route
    if quantity in ("s2", "s3", "s4"):
        _need(args, 1, quantity)
        return qseries.s_value(int(quantity[1]), _nome_arg(args[0], ctx), ctx), "eta-product"
    if quantity == "G":
        _need(args, 1, quantity)
        nome = _nome_arg(args[0], ctx)
        return qseries.g_series(nome.value, ctx), "log-sum"
    raise UsageError(f"unknown quantity {quantity!r}")


def _cmd_verify_run(ns) -> int:
    options = verify.Options(timing=not ns.no_timing)
    for path in ns.coeff_file or []:
        try:
            spec = verify.ingest_coeffs(path)
        except (OSError, verify.CoeffFileError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        options.forms[spec.label] = spec
    if ns.id:
        try:
            verify.get_identity(ns.id)
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
        try:
            reports = [verify.run_identity(ns.id, ns.digits, options)]
            errors = []
        except PrecisionUnreachable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        code = 1 if reports[0].status == "failed" else 0
    else:
        if ns.filter and not verify.select(ns.filter):
            print(f"error: no identities match {ns.filter!r}", file=sys.stderr)
            return 2
        reports, errors, code = verify.run_all(ns.digits, ns.filter, options, ns.workers)
    for err in errors:
        print(f"error: {err}", file=sys.stderr)
    for r in reports:
        if r.status == "conditional-skipped":
            print(f"warning: {r.id} skipped ({r.lhs_method})", file=sys.stderr)
        print(f"{r.id:15s} {r.status:20s} digits {r.digits_agreed:3d} / {r.target_digits}")
    if ns.json:
        payload = "\n".join(r.to_json() for r in reports) + "\n"
        if ns.json == "-":
            sys.stdout.write(payload)
        else:
            with open(ns.json, "w", encoding="utf-8") as fh:
                fh.write(payload)
    return code


def _cmd_verify_list(ns) -> int:
    for s in verify.registry():
        cap = f"<= {s.max_digits}" if s.max_digits else ""
        print(f"{s.id:15s} {s.group:12s} {s.status:12s} {cap:6s} {s.anchor}")
    return 0


def _cmd_eval(ns) -> int:
    try:
        value, method = evaluate(ns.quantity, ns.args, ns.digits)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, DomainError) else 2
    except PrecisionUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with mp.workdps(ns.digits + 5):
        print(mp.nstr(value, ns.digits))
    print(f"# method: {method}", file=sys.stderr)
    return 0


def _cmd_coeffs(ns) -> int:
    forms = lseries.builtin_forms()
    if ns.form not in forms:
        print(f"error: unknown form {ns.form!r}; built-in: {', '.join(forms)}", file=sys.stderr)
        return 2
    if ns.count < 1:
        print("error: --count must be positive", file=sys.stderr)
        return 2
    text = verify.format_coeff_file(forms[ns.form], ns.count)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_integrate(ns) -> int:
    inst = mahler.PolyInstance(ns.family, float(Fraction(ns.k)), ns.root_sign)
    try:
        r = mahler.mahler_integral(inst, ns.samples, ns.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"family": ns.family, "k": ns.k, "value": float(r.value),
                      "error_estimate": float(r.error_estimate), "route": r.route}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mahler3", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run or list registered identities")
    vsub = v.add_subparsers(dest="action", required=True)
    run = vsub.add_parser("run", help="certify identities")
    sel = run.add_mutually_exclusive_group()
    sel.add_argument("--id")
    sel.add_argument("--filter", help="group, status or id")
    run.add_argument("--digits", type=int, default=None)
    run.add_argument("--coeff-file", action="append", metavar="PATH")
    run.add_argument("--json", metavar="OUT", help="write one JSON report per line ('-' for stdout)")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--no-timing", action="store_true", help="report runtime_ms as 0")
    run.set_defaults(func=_cmd_verify_run)
    lst = vsub.add_parser("list", help="list identities")
    lst.set_defaults(func=_cmd_verify_list)

    e = sub.add_parser("eval", help="evaluate one quantity", epilog=EVAL_USAGE,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--quantity", required=True, choices=QUANTITIES)
    e.add_argument("--args", nargs="*", default=[])
    e.add_argument("--digits", type=int, default=30)
    e.set_defaults(func=_cmd_eval)

    c = sub.add_parser("coeffs", help="export built-in form coefficients")
    c.add_argument("--form", required=True)
    c.add_argument("--count", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_coeffs)

    i = sub.add_parser("integrate", help="quasi-Monte Carlo Mahler measure")
    i.add_argument("--family", required=True, choices=("f2", "f3", "f4", "qk", "smyth"))
    i.add_argument("--k", default="0")
    i.add_argument("--samples", type=int, default=10 ** 7)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--root-sign", type=int, choices=(1, -1), default=1)
    i.set_defaults(func=_cmd_integrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
