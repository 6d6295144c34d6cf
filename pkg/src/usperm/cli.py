"""Command-line entry point: ``usperm <command> ...``.

Polynomials and field elements are read and printed in hex with bit i as the
coefficient of X^i, e.g. 0xB is X^3 + X + 1.

Exit status: 0 on success, 1 when a resource budget stops a scan early,
2 on invalid input. Diagnostics go to stderr as ``usperm: error: <message>``.
"""

import argparse
import json
import sys
from pathlib import Path

from usperm import anf, permeng, search, spectra
from usperm.field import FieldCtx
from usperm.poly2 import enumerate_irreducibles, is_irreducible, poly_str

MAX_SCAN_DEGREE = 16


class UsageError(Exception):
    pass


def _hex(value):
    try:
        v = int(value, 16) if isinstance(value, str) else int(value)
    except ValueError:
        raise UsageError(f"not a hex number: {value!r}") from None
    if v < 0:
        raise UsageError(f"negative value {value!r}")
    return v


def _fmt(x):
    return f"0x{x:X}"


def _ctx(q):
    q = _hex(q)
    if q < 4:
        raise UsageError(f"modulus {_fmt(q)} has degree below 2")
    if not is_irreducible(q):
        raise UsageError(f"modulus {_fmt(q)} ({poly_str(q)}) is reducible")
    return FieldCtx.from_modulus(q)


def _spec(args):
    ctx = _ctx(args.q)
    b = _hex(args.b)
    if b >= ctx.order:
        raise UsageError(f"perturbation {_fmt(b)} has degree >= {ctx.n}")
    return permeng.PermSpec(ctx, b)


def _estimate(args, what, cells):
    print(f"usperm: estimated cost for {what}: about {cells:.3g} table cells", file=sys.stderr)


def _need_long_run(args, what):
    if not args.long_run:
        raise UsageError(f"{what} is a long run; pass --long-run to start it")


def _emit(args, text):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _kv_csv(pairs):
    return "key,value\n" + "".join(f"{k},{v}\n" for k, v in pairs)


# -- commands -----------------------------------------------------------------


def cmd_irreducibles(args):
    if not 2 <= args.n <= 24:
        raise UsageError(f"degree {args.n} outside the supported range [2, 24]")
    polys = enumerate_irreducibles(args.n)
    print(f"usperm: {len(polys)} irreducible polynomials of degree {args.n}", file=sys.stderr)
    if args.format == "json":
        _emit(args, json.dumps({"n": args.n, "count": len(polys), "polynomials": [_fmt(q) for q in polys]}) + "\n")
    else:
        _emit(args, "".join(_fmt(q) + "\n" for q in polys))


def cmd_analyze(args):
    spec = _spec(args)
    n = spec.n
    if (args.ddt or args.lat) and n >= 11:
        _need_long_run(args, f"a spectrum at n={n}")
        _estimate(args, "spectra", (args.ddt + args.lat) * 4.0 ** n)
    table = permeng.composition_table(spec)
    verdict = anf.classify_table(table, n, strict=not args.at_least)
    cycles = permeng.cycle_structure(table, n)
    round0 = permeng.cycle_structure(permeng.round_table(spec, 0), n)
    report = {
        "n": n,
        "q": _fmt(spec.ctx.modulus),
        "b": _fmt(spec.b),
        **verdict.as_dict(),
        "period": cycles.period,
        "cycle_lengths": {str(k): v for k, v in sorted(cycles.counts().items(), reverse=True)},
        "round0_unicyclic": round0.unicyclic,
    }
    if args.ddt:
        d = spectra.ddt(table)
        report["differential_uniformity"] = d.differential_uniformity
        report["ddt_hist"] = {str(v): c for v, c in d.histogram.items()}
    if args.lat:
        w = spectra.lat(table)
        report["linearity"] = w.linearity
        report["lat_hist"] = {str(v): c for v, c in w.histogram.items()}
    if args.table_out:
        permeng.write_perm_table(args.table_out, table, n)
    if args.format == "csv":
        flat = [(k, " ".join(map(str, v)) if isinstance(v, list) else v)
                for k, v in report.items() if not isinstance(v, dict)]
        _emit(args, _kv_csv(flat))
    else:
        _emit(args, json.dumps(report, indent=2) + "\n")


def cmd_trace(args):
    spec = _spec(args)
    if args.all:
        points = range(spec.ctx.order)
    elif args.a is None:
        raise UsageError("give --a or --all")
    else:
        a = int(args.a, 0)
        if not 0 <= a < spec.ctx.order:
            raise UsageError(f"input {a} outside [0, {spec.ctx.order})")
        points = [a]
    rows = [permeng.trace_rounds(spec, a) for a in points]
    if args.format == "json":
        _emit(args, json.dumps({"q": _fmt(spec.ctx.modulus), "b": _fmt(spec.b), "rows": rows}) + "\n")
    else:
        sep = "," if args.format == "csv" else " "
        _emit(args, "".join(sep.join(map(str, r)) + "\n" for r in rows))


def cmd_scan(args):
    n = args.n
    if not 2 <= n <= MAX_SCAN_DEGREE:
        raise UsageError(f"scan degree {n} outside [2, {MAX_SCAN_DEGREE}]")
    if args.b == "all":
        b_filter = None
    elif args.b == "table2":
        b_filter = "table2"
    else:
        b_filter = [_hex(args.b)]
    q_filter = None if args.q == "all" else [_ctx(args.q).modulus]
    if args.spectra and n >= 11:
        _need_long_run(args, f"spectra at n={n}")
    if args.spectra:
        _estimate(args, "spectra", 2 * 4.0 ** n * len(enumerate_irreducibles(n)) * 2 ** n / 8)
    try:
        agg = search.scan(n, b_filter=b_filter, q_filter=q_filter, collect_spectra=args.spectra,
                          workers=args.workers, partitions=args.partitions,
                          max_pairs=args.max_pairs, record_log=args.log, strict=not args.at_least)
        status = 0
    except search.ScanBudgetExceeded as exc:
        print(f"usperm: error: {exc}", file=sys.stderr)
        agg, status = exc.partial, 1
    lo, hi, _ = agg.min_max()
    print(f"usperm: n={n} |I_n|={agg.irreducible_count} pairs={agg.total_pairs} "
          f"unicyclic={agg.unicyclic_count} strong={agg.strong_count} "
          f"min={lo} max={hi} fixed_b_count={agg.fixed_b_count}", file=sys.stderr)
    if args.format == "csv":
        d = agg.as_dict()
        _emit(args, _kv_csv([(k, v) for k, v in d.items() if not isinstance(v, (dict, list))]))
    else:
        _emit(args, agg.to_json(indent=2) + "\n")
    if args.spectra:
        stem = Path(args.output).with_suffix("") if args.output else Path(f"scan_n{n}")
        agg.ddt_hist.write_csv(f"{stem}_ddt.csv", n, kind="ddt")
        agg.lat_hist.write_csv(f"{stem}_lat.csv", n, kind="lat")
    return status


def cmd_coeff_stats(args):
    d = args.d
    if d < 2:
        raise UsageError(f"degree {d} below 2")
    if d > 16:
        _need_long_run(args, f"coefficient statistics at d={d}")
        _estimate(args, "irreducibility tests", 2.0 ** (d - 1))
    rows = search.coefficient_ratios(d, long_run=args.long_run)
    if args.format == "json":
        _emit(args, json.dumps({"d": d, "ratios": {str(i): search.format_ratio(r) for i, r in rows}}) + "\n")
    else:
        sep = "," if args.format == "csv" else " "
        _emit(args, "".join(f"{i}{sep}{search.format_ratio(r)}\n" for i, r in rows))


def cmd_predict_period(args):
    spec = _spec(args)
    if not 0 <= args.k < spec.n:
        raise UsageError(f"round index {args.k} outside [0, {spec.n})")
    if spec.b == 0:
        raise UsageError("period prediction needs a nonzero perturbation")
    pred = permeng.predict_period(spec, args.k, args.L)
    actual = permeng.cycle_structure(permeng.round_table(spec, args.k), spec.n)
    proj = permeng.cycle_structure(permeng.projective_round_table(spec, args.k))
    report = {
        "n": spec.n, "q": _fmt(spec.ctx.modulus), "b": _fmt(spec.b), "k": args.k,
        "L": pred.bound_L,
        "valid_lengths": list(pred.valid_lengths),
        "period": actual.period,
        "period_in_prediction": actual.period in pred.valid_lengths,
        "cycle_lengths_uniform": actual.uniform,
        "projective_period": proj.period,
        "projective_period_in_prediction": proj.period in pred.valid_lengths,
    }
    _emit(args, json.dumps(report, indent=2) + "\n")


def cmd_reduce_word(args):
    try:
        ell = permeng.reduce_composition_word(args.word, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"n": args.n, "word": args.word, "round": ell}
    if args.q is not None:
        spec = _spec(args)
        if spec.n != args.n:
            raise UsageError(f"modulus degree {spec.n} differs from -n {args.n}")
        out["pointwise_equal"] = all(
            permeng.apply_word(spec, args.word, a) == permeng.sigma_k(spec, ell, a)
            for a in range(spec.ctx.order))
    if args.format == "json":
        _emit(args, json.dumps(out) + "\n")
    else:
        _emit(args, f"{ell}\n")


# -- parser ---------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common.add_argument("--output", "-o", help="write the main result here instead of stdout")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--long-run", action="store_true", help="allow hours-scale computations")

    parser = argparse.ArgumentParser(prog="usperm", parents=[common],
                                     description="Unicyclic strong permutation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair(p, need_b=True):
        p.add_argument("--q", required=True, help="irreducible modulus in hex")
        p.add_argument("--b", required=need_b, default="0", help="perturbation in hex")

    p = sub.add_parser("irreducibles", parents=[common], help="list irreducible polynomials")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_irreducibles)

    p = sub.add_parser("analyze", parents=[common], help="classify one (Q, b) pair")
    pair(p)
    p.add_argument("--ddt", action="store_true")
    p.add_argument("--lat", action="store_true")
    p.add_argument("--at-least", action="store_true",
                   help="accept exactly 2^(n-1) terms in the term-count property")
    p.add_argument("--table-out", help="write the permutation as a binary USP1 table")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("trace", parents=[common], help="intermediate round values")
    pair(p)
    p.add_argument("--a")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("scan", parents=[common], help="exhaustive scan at degree n")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--q", default="all")
    p.add_argument("--b", default="all", help="'all', 'table2' (1 + X^(n-1)) or a hex value")
    p.add_argument("--spectra", action="store_true")
    p.add_argument("--log", help="append-only per-pair CSV; reruns resume from it")
    p.add_argument("--max-pairs", type=int)
    p.add_argument("--partitions", type=int)
    p.add_argument("--at-least", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("coeff-stats", parents=[common], help="coefficient ratios of irreducibles")
    p.add_argument("d", type=int)
    p.set_defaults(func=cmd_coeff_stats)

    p = sub.add_parser("predict-period", parents=[common], help="matrix-product period prediction")
    pair(p)
    p.add_argument("-k", type=int, default=0)
    p.add_argument("-L", type=int)
    p.set_defaults(func=cmd_predict_period)

    p = sub.add_parser("reduce-word", parents=[common], help="collapse an alternating round word")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("word", type=int, nargs="+")
    p.add_argument("--q")
    p.add_argument("--b", default="0")
    p.set_defaults(func=cmd_reduce_word)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"usperm: error: {exc}", file=sys.stderr)
        return 2
    except MemoryError as exc:
        print(f"usperm: error: out of memory: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
