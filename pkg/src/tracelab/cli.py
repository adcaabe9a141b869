"""``tracelab`` command line.

Exit codes: 0 success, 1 mismatch or counterexample, 2 bad input, 3 budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import checks
from .arith import Params, default_budget
from .automaton import Configuration, SpaceTimeDiagram
from .errors import BudgetExceeded, ConsistencyViolation, ParseError, TracelabError
from .language import enumerate_language
from .mahler import build_constrained_prefix, render_matrix, search_finite_columns
from .numbers import encode, format_rational, parse_rational
from .representations import companion_rows
from .sofic import (LabeledGraph, build_transitive_32, build_Zpq, complexity_closed_form,
                    count_distinct_labels, transitive_32_count, w2_size)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def parse_range(text: str) -> tuple[int, int]:
    """``a..b`` with integer ends, ``a <= b``."""
    parts = text.split("..")
    if len(parts) != 2:
        raise ParseError(f"range must look like 'a..b', got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ParseError(f"range ends must be integers: {text!r}") from exc
    if lo > hi:
        raise ParseError(f"empty range {text!r}")
    return lo, hi


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, payload):
    data = payload.encode() if isinstance(payload, str) else payload
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _params(args) -> Params:
    return Params(args.p, args.q)


def _budget(args) -> int:
    return default_budget() if args.budget is None else args.budget


def _flag(ok: bool) -> str:
    return "MATCH" if ok else "MISMATCH"


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args) -> int:
    params = _params(args)
    if (args.value is None) == (args.config is None):
        raise ParseError("give exactly one of --value or --config")
    if args.value is not None:
        xi = parse_rational(args.value)
        if xi < 0:
            raise ParseError("value must be >= 0")
        x = encode(xi, params)
    else:
        x = Configuration.parse(Path(args.config).read_text(), params.base)
    if args.steps < 0:
        raise ParseError("steps must be >= 0")
    # digits touched grow by at most one position per step on each side
    work = args.steps * (len(x.core) + 2 * args.steps + 1)
    if work > _budget(args):
        raise BudgetExceeded(work, _budget(args))
    diagram = SpaceTimeDiagram.build(x, params, args.steps, args.direction)
    lo, hi = parse_range(args.window) if args.window else diagram.bounds()
    rows = diagram.matrix(lo, hi)
    if args.format == "png":
        if not args.out:
            raise ParseError("--format png needs --out")
        from .plotting import space_time_figure
        space_time_figure(rows, (lo, hi), params, args.out, title=f"{x} under x{params.p}/{params.q}")
    else:
        _emit(args, render_matrix(rows, hi - lo + 1, params, args.format))
    if args.figure and args.format != "png":
        from .plotting import space_time_figure
        space_time_figure(rows, (lo, hi), params, args.figure)
    return EXIT_OK


def cmd_language(args) -> int:
    params = _params(args)
    ordered = params.p > params.q
    header = ["n", "words", "closed_form", "count_match", "w1", "w2", "w2_expected", "w2_match"]
    rows, ns, counts, formula = [], [], [], []
    bad = False
    for n in range(1, args.n_max + 1):
        level = enumerate_language(n, params, method=args.method, budget=_budget(args),
                                   workers=args.threads)
        words, w2 = len(level), len(level.w2)
        if ordered:
            expected, w2_expected = complexity_closed_form(n, params), w2_size(n, params)
            ok, ok2 = words == expected, w2 == w2_expected
            bad |= not (ok and ok2)
            rows.append([n, words, expected, _flag(ok), len(level.w1), w2, w2_expected, _flag(ok2)])
            formula.append(expected)
        else:
            rows.append([n, words, "", "", len(level.w1), w2, "", ""])
        ns.append(n)
        counts.append(words)
    _emit(args, _csv_text(header, rows))
    if args.figure and ns:
        from .plotting import complexity_figure
        complexity_figure(ns, counts, formula if ordered else None, args.figure, label="trace words")
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_companion(args) -> int:
    params = _params(args)
    xi = parse_rational(args.value)
    if xi <= 0:
        raise ParseError("value must be a positive rational")
    lo, hi = parse_range(args.range)
    if hi - lo + 2 > _budget(args):
        raise BudgetExceeded(hi - lo + 2, _budget(args))
    data = companion_rows(xi, lo, hi, params)

    def fmt(v):
        return "" if v is None else format_rational(v)

    header = ["i", "trace_col0", "trace_col1", "Phi", "phi", "match", "partial", "error", "bound"]
    rows = [[i, c0, c1, big, small, _flag(m), fmt(part), fmt(err), fmt(bd)]
            for i, c0, c1, big, small, m, part, err, bd in data]
    _emit(args, _csv_text(header, rows))
    return EXIT_OK if all(r[5] for r in data) else EXIT_MISMATCH


def _load_graph(args):
    if args.graph == "zpq":
        params = _params(args)
        return build_Zpq(params), lambda n: complexity_closed_form(n, params)
    if args.graph == "trans32":
        return build_transitive_32(), transitive_32_count
    if not args.edges:
        raise ParseError("--graph file needs --edges PATH")
    try:
        text = Path(args.edges).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {args.edges}: {exc}") from exc
    return LabeledGraph.parse_edge_list(text), None


def cmd_sofic(args) -> int:
    graph, formula = _load_graph(args)
    header = ["n", "count", "formula", "match"]
    rows, bad = [], False
    for n in range(1, args.n_max + 1):
        c = count_distinct_labels(graph, n, cap=_budget(args))
        if formula is None:
            rows.append([n, c, "", ""])
        else:
            f = formula(n)
            bad |= c != f
            rows.append([n, c, f, _flag(c == f)])
    _emit(args, _csv_text(header, rows))
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_verify(args) -> int:
    params = _params(args)
    results = checks.run_suite(params, args.suite, stop_on_failure=True)
    out = "".join(r.line() + "\n" for r in results)
    failed = [r for r in results if not r.passed]
    if not failed:
        out += f"PASS {len(results)} checks\n"
    _emit(args, out)
    if failed:
        print(f"counterexample in {failed[0].name}: {failed[0].counterexample}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_mahler_search(args) -> int:
    params = _params(args)
    results = search_finite_columns(args.max_num, args.max_den_exp, args.steps, params,
                                    budget=_budget(args), workers=args.threads)
    shown = results[: args.top] if args.top else results
    header = ["numerator", "denominator_exponent", "run_length", "first_violation"]
    rows = [[r.numerator, r.den_exp, r.run_length, "" if r.first_violation is None else r.first_violation]
            for r in shown]
    _emit(args, _csv_text(header, rows))
    if args.figure and shown:
        from .plotting import search_figure
        search_figure(shown, args.figure)
    return EXIT_OK


def cmd_constrained_prefix(args) -> int:
    params = _params(args)
    if args.steps < 1:
        raise ParseError("steps must be >= 1")
    if args.steps * args.steps * params.base > _budget(args):
        raise BudgetExceeded(args.steps * args.steps * params.base, _budget(args))
    z = build_constrained_prefix(args.steps, params)
    header = ["step", "left_digit", "trace_digit", "valid_digits"]
    rows = [[i + 1, d, t, " ".join(map(str, ch))]
            for i, (d, t, ch) in enumerate(zip(z.left_digits, z.trace, z.choices))]
    _emit(args, _csv_text(header, rows))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _int(text):
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=_int, default=3)
    common.add_argument("--q", type=_int, default=2)
    common.add_argument("--threads", type=_nonneg_int, default=1, help="worker count (default 1)")
    common.add_argument("--budget", type=_nonneg_int, default=None,
                        help="work cap; defaults to $TRACELAB_BUDGET or 10**9")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="tracelab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="space-time diagram of the fraction automaton")
    s.add_argument("--value", help="exact rational, e.g. 1 or 9/4")
    s.add_argument("--config", help="file holding a configuration like 0|3.|0")
    s.add_argument("--steps", type=_int, default=30)
    s.add_argument("--window", help="positions a..b (default: fit the diagram)")
    s.add_argument("--format", choices=("ascii", "pgm", "png"), default="ascii")
    s.add_argument("--direction", choices=("p_over_q", "q_over_p"), default="p_over_q")
    s.add_argument("--figure", help="also save a PNG here")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("language", parents=[common], help="trace-language counts per length")
    s.add_argument("--n-max", type=_nonneg_int, default=5)
    s.add_argument("--method", choices=("centered", "window"), default="centered")
    s.add_argument("--figure", help="save a complexity plot here")
    s.set_defaults(func=cmd_language)

    s = sub.add_parser("companion", parents=[common], help="companion digits against the trace image")
    s.add_argument("--value", required=True)
    s.add_argument("--range", default="0..10")
    s.set_defaults(func=cmd_companion)

    s = sub.add_parser("sofic", parents=[common], help="distinct path-label counts of a labelled graph")
    s.add_argument("--graph", choices=("zpq", "trans32", "file"), default="zpq")
    s.add_argument("--edges", help="edge list, one 'from to label' per line")
    s.add_argument("--n-max", type=_nonneg_int, default=6)
    s.set_defaults(func=cmd_sofic)

    s = sub.add_parser("verify", parents=[common], help="run the exhaustive property checks")
    s.add_argument("--suite", choices=("lemmas", "all"), default="all")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mahler-search", parents=[common], help="rank xi by initial run inside digits < p")
    s.add_argument("--max-num", type=_nonneg_int, default=1000)
    s.add_argument("--max-den-exp", type=_nonneg_int, default=2)
    s.add_argument("--steps", type=_nonneg_int, default=40)
    s.add_argument("--top", type=_nonneg_int, default=20, help="rows to print, 0 for all")
    s.add_argument("--figure", help="save a bar chart of the top runs here")
    s.set_defaults(func=cmd_mahler_search)

    s = sub.add_parser("constrained-prefix", parents=[common],
                       help="build digits left of a seed keeping the column below p")
    s.add_argument("--steps", type=_int, default=50)
    s.set_defaults(func=cmd_constrained_prefix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"tracelab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConsistencyViolation as exc:
        print(f"tracelab: check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (TracelabError, ValueError, OSError) as exc:
        print(f"tracelab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
