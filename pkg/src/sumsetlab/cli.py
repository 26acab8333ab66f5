"""Command-line front end.

Every subcommand is a thin shell over the library: parse inputs, call the
module function, serialize the result.  Identical argv and seed produce
byte-identical stdout; timing goes to stderr only.

Exit codes: 0 success / no counterexample, 1 usage or input error,
2 counterexample found.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import bounds as B
from . import verify
from .compression import Profile, compress_axis, compress_full, compressed_sumset_size, profile_of
from .covering import h1 as h1_of
from .geometry import (
    PointSet,
    STANDARD_BASIS,
    basis,
    format_rational,
    line_count,
    max_collinear,
    minkowski_sum,
    parse_rational,
    pointset_from_json,
    pointset_to_json,
)
from .rectilinear import RectUnion, check_thm22, mink_sum_rect
from .report import SqrtExpr, value_to_json
from .search import SearchSpec, default_workers, exhaustive_search, random_search

USAGE_ERROR, COUNTEREXAMPLE_EXIT = 1, 2


class CliError(Exception):
    pass


def _load_json_arg(arg: str, field: str):
    if arg == "-":
        text = sys.stdin.read()
    elif arg.lstrip().startswith("{"):
        text = arg
    else:
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"{field}: cannot read {arg!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{field}: malformed JSON: {exc}") from exc


def _load_pointset(arg: str, field: str) -> PointSet:
    obj = _load_json_arg(arg, field)
    try:
        return pointset_from_json(obj)
    except ValueError as exc:
        raise CliError(f"{field}: {exc}") from exc


def _load_pair(args) -> tuple[PointSet, PointSet]:
    if args.a is not None and args.b is not None:
        return _load_pointset(args.a, "A"), _load_pointset(args.b, "B")
    if args.a is not None and args.b is None:
        raise CliError("provide both A and B, or neither (stdin pair)")
    obj = _load_json_arg("-", "stdin")
    if not isinstance(obj, dict) or "a" not in obj or "b" not in obj:
        raise CliError('stdin pair must be a JSON object with fields "a" and "b"')
    try:
        return pointset_from_json(obj["a"]), pointset_from_json(obj["b"])
    except ValueError as exc:
        raise CliError(f"stdin pair: {exc}") from exc


def _parse_basis(text: str | None):
    if not text:
        return STANDARD_BASIS
    try:
        part1, part2 = text.split(";")
        x1 = [parse_rational(v) for v in part1.split(",")]
        x2 = [parse_rational(v) for v in part2.split(",")]
        return basis(x1, x2)
    except (ValueError, TypeError) as exc:
        raise CliError(f'--basis must look like "1,0;0,1": {exc}') from exc


def _flatten(obj, prefix=""):
    rows = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            rows.append((prefix, json.dumps(obj)))
        else:
            for i, v in enumerate(obj):
                rows.extend(_flatten(v, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, obj))
    return rows


def _emit(doc, fmt: str):
    if fmt == "json":
        print(json.dumps(doc, indent=2))
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["field", "value"])
        for key, val in _flatten(doc):
            writer.writerow([key, val])
        sys.stdout.write(buf.getvalue())
    else:
        width = max((len(k) for k, _ in _flatten(doc)), default=0)
        for key, val in _flatten(doc):
            print(f"{key.ljust(width)}  {val}")


def _cmd_sumset(args) -> int:
    a, b = _load_pair(args)
    _emit(pointset_to_json(minkowski_sum(a, b)), args.format)
    return 0


def _cmd_compress(args) -> int:
    a = _load_pointset(args.a, "A")
    bas = _parse_basis(args.basis)
    if args.axis == "full":
        out = compress_full(a, bas)
    else:
        out = compress_axis(a, bas, int(args.axis))
    doc = pointset_to_json(out)
    if args.profile:
        doc["profile"] = profile_of(a, bas).to_json()
    _emit(doc, args.format)
    return 0


def _cmd_h1(args) -> int:
    a, b = _load_pair(args)
    _emit(h1_of(a, b).to_json(), args.format)
    return 0


def _cmd_bounds(args) -> int:
    a, b = _load_pair(args)
    s = args.s
    sa, sb = len(a), len(b)
    k = len(minkowski_sum(a, b))
    wit = h1_of(a, b)
    m, n = wit.lines_a, wit.lines_b
    doc = {
        "cardinality_a": sa,
        "cardinality_b": sb,
        "sumset_size": k,
        "h1": wit.to_json(),
        "max_collinear_a": max_collinear(a),
        "max_collinear_b": max_collinear(b),
        "line_bound": value_to_json(B.bound_lines(sa, sb, m, n), args.approx),
        "thm2": B.bound_thm2(sa, sb, m, n).to_json(args.approx),
    }
    if s is not None:
        if s >= 2:
            doc["thm1"] = B.bound_thm1(sa, sb, s).to_json(args.approx)
        if s >= 3:
            doc["thm3"] = B.bound_thm3(sa, sb, s).to_json(args.approx)
        if s >= 1:
            doc["thm4"] = B.bound_thm4(sa, sb, s).to_json(args.approx)
        if s >= 2:
            doc["monstrous"] = B.bound_monstrous(sa, sb, s).to_json(args.approx)
    if sa + sb >= 14:
        doc["sqrt_estimate"] = value_to_json(B.bound_sqrt_estimate(sa, sb), args.approx)
    _emit(doc, args.format)
    return 0


def _cmd_check(args) -> int:
    a, b = _load_pair(args)
    try:
        result = verify.check(args.theorem, a, b, args.s)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _emit(result.to_json(args.approx), args.format)
    return COUNTEREXAMPLE_EXIT if result.is_counterexample else 0


def _cmd_witness(args) -> int:
    params = {}
    if args.x is not None:
        params["x"] = args.x
    if args.s is not None:
        params["s"] = args.s
    try:
        a, b, expected = verify.witness(args.name, **params)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    doc = {"a": pointset_to_json(a), "b": pointset_to_json(b), "expected": expected}
    if args.verify:
        actual = {
            "cardinality_a": len(a),
            "cardinality_b": len(b),
            "sumset_size": len(minkowski_sum(a, b)),
            "h1": h1_of(a, b).h,
        }
        doc["actual"] = actual
        doc["witness_ok"] = all(actual[k] == expected[k] for k in actual)
    _emit(doc, args.format)
    if args.verify and not doc["witness_ok"]:
        return COUNTEREXAMPLE_EXIT
    return 0


def _parse_size_range(text: str | None):
    if not text:
        return (1, None)
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi) if hi else None)
    except ValueError as exc:
        raise CliError(f"size range must look like 2:6, got {text!r}") from exc


def _cmd_search(args) -> int:
    try:
        w, _, h = args.grid.lower().partition("x")
        width, height = int(w), int(h)
    except ValueError as exc:
        raise CliError(f"--grid must look like 3x3, got {args.grid!r}") from exc
    theorems = tuple(t.strip() for t in args.theorems.split(",") if t.strip())
    s_values = tuple(int(v) for v in args.s.split(",")) if args.s else ()
    workers = args.workers if args.workers is not None else default_workers()
    stream_mode = args.stream
    if stream_mode == "all" and workers > 1:
        print("stream=all forces a single worker for deterministic output", file=sys.stderr)
        workers = 1
    try:
        spec = SearchSpec(
            width=width,
            height=height,
            size_a=_parse_size_range(args.size_a),
            size_b=_parse_size_range(args.size_b),
            theorems=theorems,
            s_values=s_values,
            symmetry=args.symmetry,
            workers=workers,
            no_collinear=args.no_collinear,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    emit = None
    if stream_mode == "all":
        emit = lambda record: print(json.dumps(record))
    t0 = time.perf_counter()
    if args.random:
        if args.seed is None:
            raise CliError("--random requires --seed")
        summary = random_search(spec, args.random, args.seed, emit)
    else:
        summary = exhaustive_search(spec, emit)
    elapsed = time.perf_counter() - t0
    if stream_mode == "counterexamples":
        for key, entry in summary.keys.items():
            for example in entry["examples"]:
                print(json.dumps(example))
    print(json.dumps(summary.to_json(), indent=2))
    print(f"search completed in {elapsed:.2f}s", file=sys.stderr)
    return summary.exit_code


def _cmd_continuous(args) -> int:
    if args.action != "check":
        raise CliError("continuous supports the 'check' action")
    ra = RectUnion.from_json(_load_json_arg(args.a, "A"))
    rb = RectUnion.from_json(_load_json_arg(args.b, "B"))
    result = check_thm22(ra, rb)
    doc = result.to_json(args.approx)
    doc["sum"] = mink_sum_rect(ra, rb).to_json()
    _emit(doc, args.format)
    return COUNTEREXAMPLE_EXIT if result.is_counterexample else 0


def _cmd_lemma21(args) -> int:
    if args.a or args.b:
        if not (args.a and args.b):
            raise CliError("provide both --a and --b")
        av = [parse_rational(v) for v in args.a.split(",")]
        bv = [parse_rational(v) for v in args.b.split(",")]
        u = B.lemma21_u(av, bv)
        m, n = len(av), len(bv)
        rhs = (m + n - 1) * (sum(av) / m + sum(bv) / n)
        doc = {
            "u": value_to_json(u, args.approx),
            "rhs": value_to_json(rhs, args.approx),
            "holds": u >= rhs,
            "equality": u == rhs,
            "equality_expected": B.lemma21_equality_expected(av, bv),
        }
        _emit(doc, args.format)
        return 0 if u >= rhs else COUNTEREXAMPLE_EXIT
    max_entry = args.exhaustive_max
    max_len = args.max_len
    checked = 0
    violations = 0
    mismatches = 0
    for m in range(1, max_len):
        for n in range(1, max_len - m + 1):
            for a_vec in _int_vectors(m, max_entry):
                for b_vec in _int_vectors(n, max_entry):
                    u = B.lemma21_u(a_vec, b_vec)
                    rhs = Fraction((m + n - 1)) * (Fraction(sum(a_vec), m) + Fraction(sum(b_vec), n))
                    checked += 1
                    if u < rhs:
                        violations += 1
                    if (u == rhs) != B.lemma21_equality_expected(a_vec, b_vec):
                        mismatches += 1
    doc = {
        "max_entry": max_entry,
        "max_len_sum": max_len,
        "checked": checked,
        "violations": violations,
        "equality_mismatches": mismatches,
    }
    _emit(doc, args.format)
    return 0 if violations == 0 and mismatches == 0 else COUNTEREXAMPLE_EXIT


def _int_vectors(length, max_entry):
    vec = [0] * length
    while True:
        yield tuple(vec)
        i = length - 1
        while i >= 0 and vec[i] == max_entry:
            vec[i] = 0
            i -= 1
        if i < 0:
            return
        vec[i] += 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumsetlab",
        description="Exact toolkit for planar sumsets: Minkowski sums, compressions, "
        "covering numbers, lower bounds, and exhaustive lattice search.",
    )
    parser.add_argument("--format", choices=("json", "csv", "table"), default="json")
    parser.add_argument("--approx", action="store_true", help="add decimal renderings to exact values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sumset", help="Minkowski sum of two point sets")
    p.add_argument("a", nargs="?", default=None)
    p.add_argument("b", nargs="?", default=None)
    p.set_defaults(fn=_cmd_sumset)

    p = sub.add_parser("compress", help="linear compression of a point set")
    p.add_argument("a")
    p.add_argument("--basis", default=None, help='ordered basis "x1x,x1y;x2x,x2y"')
    p.add_argument("--axis", choices=("1", "2", "full"), default="full")
    p.add_argument("--profile", action="store_true", help="include the line-cardinality profile")
    p.set_defaults(fn=_cmd_compress)

    p = sub.add_parser("h1", help="minimum parallel-line covering number")
    p.add_argument("a", nargs="?", default=None)
    p.add_argument("b", nargs="?", default=None)
    p.set_defaults(fn=_cmd_h1)

    p = sub.add_parser("bounds", help="evaluate every lower bound for a pair")
    p.add_argument("a", nargs="?", default=None)
    p.add_argument("b", nargs="?", default=None)
    p.add_argument("--s", type=int, default=None)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("check", help="run a theorem check on a pair")
    p.add_argument("theorem", choices=verify.THEOREM_IDS)
    p.add_argument("a", nargs="?", default=None)
    p.add_argument("b", nargs="?", default=None)
    p.add_argument("--s", type=int, default=None)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("search", help="exhaustive or randomized sweep over a grid")
    p.add_argument("--grid", default="3x3")
    p.add_argument("--theorems", default="A")
    p.add_argument("--s", default=None, help="comma-separated covering parameters")
    p.add_argument("--size-a", dest="size_a", default=None, help="cardinality range lo:hi")
    p.add_argument("--size-b", dest="size_b", default=None)
    p.add_argument("--symmetry", action="store_true", help="quotient by the grid symmetry group")
    p.add_argument("--no-collinear", dest="no_collinear", type=int, default=None,
                   help="keep only sets with fewer than this many collinear points")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--random", type=int, default=None, help="number of random pairs instead of exhaustive")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--stream", choices=("none", "counterexamples", "all"), default="counterexamples")
    p.set_defaults(fn=_cmd_search)

    p = sub.add_parser("witness", help="construct a named extremal example")
    p.add_argument("name", choices=verify.WITNESS_NAMES)
    p.add_argument("--x", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--verify", action="store_true", help="recompute and compare the claimed values")
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("continuous", help="rectilinear union checks")
    p.add_argument("action", choices=("check",))
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=_cmd_continuous)

    p = sub.add_parser("lemma21", help="max-plus convolution average bound")
    p.add_argument("--a", default=None, help="comma-separated rational vector")
    p.add_argument("--b", default=None)
    p.add_argument("--exhaustive-max", dest="exhaustive_max", type=int, default=4)
    p.add_argument("--max-len", dest="max_len", type=int, default=7,
                   help="largest allowed m+n in the exhaustive sweep")
    p.set_defaults(fn=_cmd_lemma21)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
