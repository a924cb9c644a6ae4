"""Command line entry point: ``cytwist <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .charfield import QuadraticCharacterSpec, chi_eval, primes_up_to
from .counting import DEFAULT_BUDGET, count_spec, count_twist
from .forms import ResidueFormSpec, admissible_charts, pullback_sign_detail
from .harness import run_catalog, verify_geometric_twist, verify_modular_twist
from .qseries import (
    EtaQuotient,
    NoSimpleAnswer,
    expand_eta_quotient,
    expansion_to_json,
    get_newform,
    load_coefficients,
    twist_minimality_report,
)
from .varieties import CATALOG, catalog_get, load_definitions


def _budget(text: str) -> int:
    """Accept ``8589934592``, ``2^33`` or ``2**33``."""
    text = text.replace("**", "^")
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def _coefficient_map(items) -> dict:
    out = {}
    for item in items or []:
        label, sep, path = item.partition("=")
        if not sep:
            raise SystemExit(f"--coefficients expects LABEL=PATH, got {item!r}")
        out[label] = load_coefficients(path)
    return out


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_eta(args) -> int:
    eq = EtaQuotient.parse(args.spec)
    f = expand_eta_quotient(eq, args.precision)
    label = args.label or args.spec
    if args.format == "json":
        _emit(json.dumps(expansion_to_json(label, args.level, f)), args.output)
    else:
        lines = ["n,c_n"] + [f"{n},{c}" for n, c in enumerate(f.coeffs, 1)]
        _emit("\n".join(lines), args.output)
    return 0


def cmd_twist_form(args) -> int:
    extra = _coefficient_map(args.coefficients)
    record = extra.get(args.form) or get_newform(args.form)
    res = verify_modular_twist(record, args.d, args.pmax)
    out = {
        "label": res.label,
        "d": res.d,
        "level": res.level,
        "twisted_level": res.twisted_level if res.twisted_level is not None else "no simple answer",
        "level_note": res.level_note,
        "involutive": res.involutive,
        "verdict": res.verdict,
        "rows": [{"p": p, "chi": c, "a_p": str(a), "b_p": str(b)} for p, c, a, b in res.rows],
    }
    if args.format == "json":
        print(json.dumps(out, indent=2))
    else:
        print(f"{res.label} twisted by d={res.d}: level {res.level} -> {out['twisted_level']} ({res.verdict})")
        for r in out["rows"]:
            print(f"  p={r['p']:4d} chi={r['chi']:+d} a_p={r['a_p']:>8} b_p={r['b_p']:>8}")
    return 0


def cmd_count(args) -> int:
    entry = catalog_get(args.variety)
    budget = _budget(args.budget)
    if args.d is not None and args.d != 1:
        if entry.family is None:
            raise SystemExit(f"{args.variety} has no twist family")
        res = count_twist(entry.family, args.d, args.p, args.threads, budget, args.method)
    else:
        res = count_spec(entry.spec, args.p, args.threads, budget, args.method)
        res.variety = entry.id
        res.d = args.d
    if args.format == "json":
        print(json.dumps(res.to_dict()))
    else:
        print(f"#{res.variety}(F_{res.p}) = {res.count}" + (f" (d={res.d})" if res.d else ""))
    return 0


def cmd_sign(args) -> int:
    entry = catalog_get(args.variety)
    v = entry.variety
    inv = entry.involution(args.involution)
    if args.i0 is not None or args.I is not None:
        if args.i0 is None or args.I is None:
            raise SystemExit("--i0 and --I must be given together")
        chart = [c.strip() for c in args.i0.split(",")]
        I = [c.strip() for c in args.I.split(",")]
        chart = [int(c) if c.isdigit() else c for c in chart]
        I = [int(c) if c.isdigit() else c for c in I]
        res = pullback_sign_detail(ResidueFormSpec(v, chart, I), inv)
    elif entry.form_chart is not None:
        res = pullback_sign_detail(ResidueFormSpec(v, *entry.form_chart), inv)
    else:
        charts = admissible_charts(v, inv)
        if not charts:
            raise SystemExit("no admissible chart for this involution")
        res = charts[0]
    print(f"sign: {res.sign:+d}")
    print(f"form: {res.form.describe()}")
    print(f"numerator sign {res.numerator_sign:+d}, D_I o iota = {res.denominator_sign:+d} D_I")
    return 0


def cmd_verify(args) -> int:
    from .harness.pipelines import CountCache

    cache = CountCache(args.threads, _budget(args.budget))
    rep = verify_geometric_twist(
        args.family, args.d, pmax=args.pmax, newforms=_coefficient_map(args.coefficients), cache=cache
    )
    if args.report:
        text = rep.to_csv() if args.report.endswith(".csv") else rep.to_json()
        Path(args.report).write_text(text)
    print(rep.summary())
    return 1 if rep.verdict == "fail" else 0


def cmd_run(args) -> int:
    config = json.loads(Path(args.config).read_text())
    out = run_catalog(config)
    for s in out["sections"]:
        if "error" in s:
            print(f"{s['family']} d={s['d']}: error: {s['error']}", file=sys.stderr)
        else:
            print(f"{s['family']} d={s['d']}: {s['report']['verdict']}")
    if args.output:
        Path(args.output).write_text(json.dumps(out, indent=2))
    return out["exit_code"]


def cmd_minimality(args) -> int:
    extra = _coefficient_map(args.coefficients)
    form = extra.get(args.form) or get_newform(args.form)
    cands = [extra.get(c) or get_newform(c) for c in args.candidates.split(",")]
    rep = twist_minimality_report(form, cands, args.pmax)
    if args.format == "json":
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        for c in rep.candidates:
            print(c.text)
        for flag in rep.claimed_flags:
            print(f"flag: {flag}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cytwist", description="Quadratic twists of Calabi-Yau threefolds and modular forms.")
    ap.add_argument("--defs", action="append", help="variety definition file overriding the catalog (repeatable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eta", help="expand an eta quotient")
    p.add_argument("--spec", required=True, help='factors "m:r,m:r", e.g. "3:8"')
    p.add_argument("--precision", type=int, default=100)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--label")
    p.add_argument("--level", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("twist-form", help="twist a newform by a quadratic character")
    p.add_argument("--form", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--pmax", type=int, default=50)
    p.add_argument("--coefficients", action="append", metavar="LABEL=PATH")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_twist_form)

    p = sub.add_parser("count", help="count F_p points of a catalog variety or its twist")
    p.add_argument("--variety", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", default=str(DEFAULT_BUDGET))
    p.add_argument("--method", default="auto", choices=["auto", "enumerate", "separable", "square-elimination"])
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sign", help="pullback sign of the residue form under an involution")
    p.add_argument("--variety", required=True)
    p.add_argument("--involution")
    p.add_argument("--i0", help="chart coordinate(s), names or indices, comma separated")
    p.add_argument("--I", help="Jacobian minor coordinates, comma separated")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="compare a geometric twist with the modular twist")
    p.add_argument("--family", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--pmax", type=int, default=50)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", default=str(DEFAULT_BUDGET))
    p.add_argument("--coefficients", action="append", metavar="LABEL=PATH")
    p.add_argument("--report", help="write the report to a .json or .csv file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="batch verification from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("minimality", help="twist-minimality report for a newform")
    p.add_argument("--form", required=True)
    p.add_argument("--candidates", required=True, help="comma separated newform labels")
    p.add_argument("--coefficients", action="append", metavar="LABEL=PATH")
    p.add_argument("--pmax", type=int, default=50)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_minimality)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    for path in args.defs or []:
        CATALOG.update(load_definitions(path))
    try:
        return args.func(args)
    except (KeyError, ValueError, NoSimpleAnswer) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
