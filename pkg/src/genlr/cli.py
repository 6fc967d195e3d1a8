"""Command-line interface.

Exit status: 0 on success, 1 when the input is well formed but rejected (a
string that does not parse, a logical form with no realization, a grammar
that cannot be compiled), 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from . import __version__
from .gen_compile import (
    DEFAULT_DEPTH, DEFAULT_MAX_BUDGET, CompileError, Mode, compile_tables, dump_tables,
    format_entries, format_state, load_tables, nondeterminism_report, save_tables,
)
from .generator import compare, format_compare, generate
from .grammar import GrammarError, load_grammar, normalize, report_problems
from .inversion import InversionError, format_inverted, invert_grammar
from .lr_parse import (
    ParseError, cfg_of, compile_parse_tables, derivation_rules, format_states, format_table,
    parse, reconstruct,
)
from .shdg import GenerationError, shdg_generate
from .terms import TermSyntaxError, canonical, parse_term, parse_terms


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _grammar(path: str):
    _read(path)
    return load_grammar(path)


def _term(text: str):
    try:
        return parse_term(text)
    except TermSyntaxError as e:
        raise UsageError(f"malformed term: {e}") from None


def _corpus(path: str):
    try:
        return parse_terms(_read(path))
    except TermSyntaxError as e:
        raise UsageError(f"{path}: malformed term: {e}") from None


def _tables(path: str):
    _read(path)
    return load_tables(path)


def _default_budget() -> int:
    raw = os.environ.get("GENLR_MAX_BUDGET")
    if raw is None:
        return DEFAULT_MAX_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GENLR_MAX_BUDGET must be an integer, not {raw!r}") from None


def _mode(args) -> Mode:
    budget = args.max_budget if args.max_budget is not None else _default_budget()
    if budget < 1 or args.default_depth < 0:
        raise UsageError("budgets and depths must be positive")
    if args.examples:
        return Mode.from_examples(_corpus(args.examples), budget, args.default_depth)
    if args.auto:
        return Mode.auto(budget, fallback=not args.no_fallback)
    depth = args.fixed if args.fixed is not None else 1
    if depth < 0:
        raise UsageError("--fixed depth must be >= 0")
    return Mode.fixed(depth)


def _write(text: str, path: Optional[str]) -> None:
    if path:
        try:
            with open(path, "w", encoding="utf-8") as f:
                f.write(text)
        except OSError as e:
            raise UsageError(f"cannot write {path}: {e.strerror}") from None
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_compile_parse(args) -> int:
    t = compile_parse_tables(cfg_of(_grammar(args.grammar)))
    out = []
    if not args.table_only:
        out.append(format_states(t))
        out.append("")
    out.append(format_table(t))
    _write("\n".join(out) + "\n", args.output)
    return 0


def cmd_parse(args) -> int:
    g = _grammar(args.grammar)
    t = compile_parse_tables(cfg_of(g))
    words = args.words if args.words else sys.stdin.read().split()
    trees = parse(t, words)
    if not trees:
        print("rejected", file=sys.stderr)
        return 1
    for tree in trees:
        _, lf = reconstruct(g, tree)
        rules = " ".join(map(str, derivation_rules(tree)))
        print(f"{canonical(lf)}\trules {rules}")
    return 0


def cmd_invert(args) -> int:
    g = normalize(_grammar(args.grammar))
    for r in invert_grammar(g):
        chain = ",".join(map(str, r.chain))
        print(f"({chain}) {format_inverted(r, words=not args.no_words)}")
    return 0


def cmd_compile_gen(args) -> int:
    g = _grammar(args.grammar)
    if not report_problems(g):
        return 1
    t = compile_tables(normalize(g), _mode(args))
    if args.output:
        save_tables(t, args.output)
        rep = nondeterminism_report(t)
        worst = max(rep.values(), default=0)
        print(f"{len(t.states)} states, {len(rep)} reductive, max reductions {worst}", file=sys.stderr)
    else:
        _write(dump_tables(t), None)
    return 0


def cmd_generate(args) -> int:
    t = _tables(args.tables)
    lf = _term(args.lf)
    strings, stats = generate(t, args.cat or t.top, lf, first=args.first)
    for s in strings:
        print(s)
    if args.stats:
        print(stats, file=sys.stderr)
    return 0 if strings else 1


def cmd_shdg(args) -> int:
    g = _grammar(args.grammar)
    lf = _term(args.lf)
    strings, stats = shdg_generate(g, args.cat or g.top, lf, first=args.first,
                                   chain_bound=args.chain_bound)
    for s in strings:
        print(s)
    if args.stats:
        print(stats, file=sys.stderr)
    return 0 if strings else 1


def cmd_optimize(args) -> int:
    """Compile optimized tables and show reduce counts against functor-only keys."""
    g = _grammar(args.grammar)
    if not report_problems(g):
        return 1
    ng = normalize(g)
    if not (args.auto or args.examples):
        args.auto = True
    mode = _mode(args)
    base = nondeterminism_report(compile_tables(ng, Mode.fixed(0)))
    t = compile_tables(ng, mode)
    opt = nondeterminism_report(t)
    if args.output:
        save_tables(t, args.output)
    summary = {
        "mode": mode.kind,
        "baseline": {"states": len(base), "max_reductions": max(base.values(), default=0),
                     "nondeterministic_states": sum(1 for v in base.values() if v > 1)},
        "optimized": {"states": len(opt), "max_reductions": max(opt.values(), default=0),
                      "nondeterministic_states": sum(1 for v in opt.values() if v > 1)},
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        for name in ("baseline", "optimized"):
            s = summary[name]
            print(f"{name}: {s['states']} reductive states, max reductions {s['max_reductions']}, "
                  f"{s['nondeterministic_states']} nondeterministic")
    return 0


def cmd_compare(args) -> int:
    g = _grammar(args.grammar)
    t = _tables(args.tables)
    rows = compare(t, g, _corpus(args.corpus))
    sys.stdout.write(format_compare(rows, args.format))
    return 0 if all(r.agree for r in rows) else 1


def cmd_report(args) -> int:
    t = _tables(args.tables)
    rep = nondeterminism_report(t)
    if args.format == "json":
        print(json.dumps({str(k): v for k, v in rep.items()}, indent=2))
        return 0
    if args.format == "csv":
        print("state,reductions")
        for s, n in rep.items():
            print(f"{s},{n}")
        return 0
    states = args.states if args.states else []
    for sid in states:
        if sid not in t.states:
            raise UsageError(f"no state {sid}")
        print(format_state(t, sid))
    if states:
        print()
    if args.entries:
        print(format_entries(t))
        print()
    for s, n in rep.items():
        print(f"state {s}: {n} reduction{'s' if n != 1 else ''}")
    worst = max(rep.values(), default=0)
    print(f"{len(t.states)} states, {len(rep)} reductive, "
          f"{'deterministic' if worst <= 1 else f'max reductions {worst}'}")
    return 0


# -- parser ----------------------------------------------------------------------------

def _compile_options(p: argparse.ArgumentParser) -> None:
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--fixed", type=int, metavar="D", help="uniform lookahead depth (0 and 1: functor only)")
    mode.add_argument("--auto", action="store_true", help="deepen lookahead until reductive states are deterministic")
    mode.add_argument("--examples", metavar="FILE", help="training logical forms, one per line")
    p.add_argument("--max-budget", type=int, help=f"largest lookahead budget tried (default {DEFAULT_MAX_BUDGET}, "
                                                  "or $GENLR_MAX_BUDGET)")
    p.add_argument("--default-depth", type=int, default=DEFAULT_DEPTH,
                   help="depth for continuations not covered by examples")
    p.add_argument("--no-fallback", action="store_true",
                   help="in --auto mode, fail instead of tolerating nondeterminism")
    p.add_argument("-o", "--output", metavar="FILE", help="write tables here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="genlr", description="LR-compiled generation from logical forms.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("compile-parse", help="SLR(1) states and action/goto table")
    p.add_argument("grammar")
    p.add_argument("--table-only", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile_parse)

    p = sub.add_parser("parse", help="parse words and print their logical forms")
    p.add_argument("grammar")
    p.add_argument("words", nargs="*", help="tokens (read from stdin when omitted)")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("invert", help="list the inverted grammar")
    p.add_argument("grammar")
    p.add_argument("--no-words", action="store_true", help="omit word difference lists")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("compile-gen", help="compile generation tables")
    p.add_argument("grammar")
    _compile_options(p)
    p.set_defaults(func=cmd_compile_gen)

    p = sub.add_parser("generate", help="generate strings from compiled tables")
    p.add_argument("--tables", required=True)
    p.add_argument("--lf", required=True, help="ground logical form")
    p.add_argument("--cat", help="category (default: the tables' top symbol)")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--all", dest="first", action="store_false", help="all strings (default)")
    which.add_argument("--first", dest="first", action="store_true", help="stop at the first string")
    p.add_argument("--stats", action="store_true", help="print search statistics on stderr")
    p.set_defaults(func=cmd_generate, first=False)

    p = sub.add_parser("shdg-generate", help="generate with the semantic-head-driven baseline")
    p.add_argument("grammar")
    p.add_argument("--lf", required=True)
    p.add_argument("--cat")
    p.add_argument("--first", action="store_true")
    p.add_argument("--chain-bound", type=int)
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_shdg)

    p = sub.add_parser("optimize", help="compile optimized tables and compare with functor-only keys")
    p.add_argument("grammar")
    _compile_options(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compare", help="table-driven versus baseline search cost on a corpus")
    p.add_argument("grammar")
    p.add_argument("--tables", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="reduce counts and state listings of compiled tables")
    p.add_argument("--tables", required=True)
    p.add_argument("--states", type=int, nargs="*", metavar="N", help="states to list")
    p.add_argument("--entries", action="store_true", help="list descend/goto/reduce entries")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"genlr: {e}", file=sys.stderr)
        return 2
    except GrammarError as e:
        print(f"genlr: {e}", file=sys.stderr)
        return 1
    except (CompileError, InversionError, GenerationError, ParseError) as e:
        print(f"genlr: {e}", file=sys.stderr)
        return 1


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
