"""Command-line harness: analyze a polynomial's fiber structure, verify
theorem families over parameter grids, search for m-to-1 forms, and count
m-to-1 self-maps.

Exit codes: 0 success (and, for verify, zero disagreements); 1 verify found
disagreements; 2 parse failure; 3 unsupported scale; 4 search budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .criteria import HypothesisError
from .galois import FieldError, Poly, ScaleError, parse_field
from .harness import VerifyJob, run_job
from .multiplicity import (FiniteMapping, admissible_m_set, check_m_to_1,
                           count_by_enumeration, count_formula,
                           fiber_histogram)
from .search import BudgetError, DEFAULT_BUDGET, search_forms

EXIT_OK = 0
EXIT_DISAGREE = 1
EXIT_PARSE = 2
EXIT_SCALE = 3
EXIT_BUDGET = 4


def _parse_int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _parse_grid(text):
    """Extra grid options: 'k=v;k2=v2' with v an int, int list, or range."""
    opts = {}
    for pair in text.split(";"):
        if not pair.strip():
            continue
        key, _, value = pair.partition("=")
        values = _parse_int_list(value)
        opts[key.strip()] = values[0] if len(values) == 1 else tuple(values)
    return opts


def _pick(positional, flagged, what):
    if positional is not None and flagged is not None and positional != flagged:
        raise ValueError(f"{what} given twice: {positional!r} vs {flagged!r}")
    value = positional if positional is not None else flagged
    if value is None:
        raise ValueError(f"missing {what}")
    return value


def _emit(payload, args):
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if getattr(args, "json", False) or not getattr(args, "out", None):
        return text
    return None


def cmd_analyze(args):
    args.field = _pick(args.field, args.field_flag, "field spec")
    args.poly = _pick(args.poly, args.poly_flag, "polynomial")
    spec = parse_field(args.field)
    poly = Poly.from_string(spec, args.poly)
    domain = spec.star_elements() if args.star else spec.elements()
    mapping = FiniteMapping.from_function(domain, poly)
    hist = fiber_histogram(mapping)
    admissible = sorted(admissible_m_set(mapping))
    ms = [args.m] if args.m else admissible
    reports = [check_m_to_1(mapping, m) for m in ms]
    payload = {
        "field": args.field,
        "poly": args.poly,
        "domain": "F_q^*" if args.star else "F_q",
        "size": len(mapping),
        "histogram": list(hist),
        "admissible_m": admissible,
        "reports": [r.to_json() for r in reports],
    }
    if args.json or args.out:
        text = _emit(payload, args)
        if text and args.json:
            print(text)
    else:
        dom = payload["domain"]
        print(f"f = {args.poly} on {dom} of GF({spec.q})")
        print(f"fiber histogram: {list(hist)}")
        print(f"admissible m: {admissible or 'none'}")
        for rep in reports:
            exc = [str(e) for e in rep.exceptional_set]
            print(f"m={rep.m}: verdict={rep.verdict} k={rep.k} r={rep.r} "
                  f"exceptional={exc}")
    return EXIT_OK


def _verify_options(args):
    opts = {}
    if args.q:
        opts["qs"] = tuple(_parse_int_list(args.q))
    if args.n:
        opts["ns"] = tuple(_parse_int_list(args.n))
    if args.hcount:
        opts["hcount"] = args.hcount
    if args.draws:
        opts["draws"] = args.draws
    if args.count:
        opts["count"] = args.count
    if args.grid:
        opts.update(_parse_grid(args.grid))
    if args.all:
        opts.setdefault("hcount", 200)
        opts.setdefault("draws", 500)
    return opts


def cmd_verify(args):
    args.family = _pick(args.family, args.family_flag, "family")
    job = VerifyJob(args.family, _verify_options(args), seed=args.seed,
                    jobs=args.jobs)
    report = run_job(job)
    if args.csv:
        _write_csv(report, args.csv)
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        s = report["summary"]
        print(f"family={report['family']} total={s['total']} "
              f"agreements={s['agreements']} disagreements={s['disagreements']} "
              f"skipped={s['skipped']}")
        for rec in report["records"]:
            if rec["agree"] is False:
                print(f"DISAGREEMENT: {json.dumps(rec['params'], sort_keys=True)}")
    return EXIT_OK if report["summary"]["disagreements"] == 0 else EXIT_DISAGREE


def _write_csv(report, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["evaluator", "params", "predicted", "observed",
                         "agree", "skipped"])
        for rec in report["records"]:
            writer.writerow([
                rec["evaluator"],
                json.dumps(rec["params"], sort_keys=True, default=str),
                json.dumps(rec["predicted"], sort_keys=True, default=str),
                json.dumps(rec["observed"], sort_keys=True, default=str),
                rec["agree"], rec["skipped"] or ""])


def cmd_search(args):
    spec = parse_field(args.field)
    r_values = _parse_int_list(args.r) if args.r else None
    hits = search_forms(spec, args.s, args.deg, args.m, r_values=r_values,
                        budget=args.budget)
    payload = {"field": args.field, "s": args.s, "deg": args.deg, "m": args.m,
               "hits": hits, "count": len(hits)}
    if args.json or args.out:
        text = _emit(payload, args)
        if text and args.json:
            print(text)
    else:
        print(f"{len(hits)} hit(s) for m={args.m}, shape x^r h(x^{args.s}), "
              f"deg h <= {args.deg} over GF({spec.q})")
        for hit in hits:
            print(f"r={hit['r']} h={hit['h']} verified={hit['verified']}")
    return EXIT_OK


def cmd_count(args):
    qs = _parse_int_list(args.q)
    rows = []
    for q in qs:
        ms = [args.m] if args.m else list(range(1, q + 1))
        census = None
        if args.check:
            if q > 6:
                raise ScaleError(f"enumeration over {q}^{q} maps is too large")
            census = count_by_enumeration(q)
        for m in ms:
            row = {"q": q, "m": m, "count": count_formula(q, m)}
            if census is not None:
                row["enumerated"] = census[m]
                row["agree"] = row["count"] == census[m]
            rows.append(row)
    payload = {"rows": rows}
    if args.json or args.out:
        text = _emit(payload, args)
        if text and args.json:
            print(text)
    else:
        for row in rows:
            extra = ""
            if "enumerated" in row:
                extra = f" enumerated={row['enumerated']} agree={row['agree']}"
            print(f"q={row['q']} m={row['m']} count={row['count']}{extra}")
    if any(not row.get("agree", True) for row in rows):
        return EXIT_DISAGREE
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mto1",
        description="m-to-1 mappings over finite fields: analysis, theorem "
                    "verification, and search")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="fiber analysis of one polynomial")
    pa.add_argument("field", nargs="?", default=None,
                    help="field spec, e.g. 5^1 or 2^6/1,1,0,1,1,0,1")
    pa.add_argument("poly", nargs="?", default=None,
                    help="coefficients low-to-high, e.g. 0,1,0,1")
    pa.add_argument("--field", dest="field_flag", default=None)
    pa.add_argument("--poly", dest="poly_flag", default=None)
    pa.add_argument("--m", type=int, default=None)
    pa.add_argument("--star", action="store_true",
                    help="restrict the domain to F_q^*")
    pa.add_argument("--json", action="store_true")
    pa.add_argument("--out", default=None)
    pa.set_defaults(fn=cmd_analyze)

    families = ("main", "small", "ell", "monomial", "hd", "lift", "g3", "g5",
                "split", "lemmas", "transfer", "towers", "criteria", "count")
    pv = sub.add_parser("verify", help="run a theorem family against oracles")
    pv.add_argument("family", nargs="?", choices=families, default=None)
    pv.add_argument("--family", dest="family_flag", choices=families,
                    default=None)
    pv.add_argument("--q", default=None, help="e.g. 29 or 2..5 or 4,8")
    pv.add_argument("--n", default=None, help="e.g. 2..8")
    pv.add_argument("--grid", default=None,
                    help="extra grid options, e.g. 'degmax=4;qs=5,7'")
    pv.add_argument("--hcount", type=int, default=None)
    pv.add_argument("--draws", type=int, default=None)
    pv.add_argument("--count", type=int, default=None)
    pv.add_argument("--all", action="store_true",
                    help="acceptance-scale grid sizes")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--jobs", type=int, default=0,
                    help="worker processes (default: all cores)")
    pv.add_argument("--json", action="store_true")
    pv.add_argument("--out", default=None)
    pv.add_argument("--csv", default=None)
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("search", help="search x^r h(x^s) forms for target m")
    ps.add_argument("field")
    ps.add_argument("--s", type=int, required=True)
    ps.add_argument("--deg", type=int, required=True)
    ps.add_argument("--m", type=int, required=True)
    ps.add_argument("--r", default=None,
                    help="restrict r (default: all of 1..q-1)")
    ps.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ps.add_argument("--json", action="store_true")
    ps.add_argument("--out", default=None)
    ps.set_defaults(fn=cmd_search)

    pc = sub.add_parser("count", help="m-to-1 self-map counts")
    pc.add_argument("--q", required=True, help="e.g. 5 or 2..5")
    pc.add_argument("--m", type=int, default=None)
    pc.add_argument("--check", action="store_true",
                    help="cross-check against exhaustive enumeration")
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--out", default=None)
    pc.set_defaults(fn=cmd_count)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScaleError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCALE
    except BudgetError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (FieldError, HypothesisError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
