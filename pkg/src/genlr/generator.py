"""Table-driven generation: recursive descent through the logical form.

At a state whose dot is before argument ``i`` of the current logical form,
the descend entry for that argument gives the state from which the argument
is generated; the resulting constituent is pushed and the goto entry gives
the state for argument ``i + 1``.  In a reductive state each reduce rule is
tried against the pushed constituents.  Alternatives are explored lazily, so
``first`` mode stops as soon as one string is complete.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .gen_compile import GenTables
from .grammar import DUMMY_FUNCTOR, sem_of
from .shdg import GenStats, GenerationError, shdg_generate
from .grammar import Grammar
from .terms import NIL, Struct, Term, Var, canonical, core, list_items, resolve, unify

__all__ = ["generate", "compare", "CompareRow", "format_compare"]


def _run(t: GenTables, sid: int, lf: Term, stack: Tuple[Term, ...],
         stats: GenStats) -> Iterator[Term]:
    """Constituents for ``lf`` generated from state ``sid``."""
    args = lf.args if isinstance(lf, Struct) else ()
    state = t.states.get(sid)
    pos = state.pos if state is not None else len(stack)
    if pos < len(args):
        arg = args[pos]
        d = t.lookup(t.descend, sid, arg)
        g = t.lookup(t.goto, sid, arg)
        if d is None or g is None:
            return
        for c in _run(t, d[1], arg, (), stats):
            yield from _run(t, g[1], lf, stack + (c,), stats)
        return
    for rule in t.reduce_rules(sid, lf):
        stats.choice_points += 1
        r = rule.renamed()
        b = unify(core(sem_of(r.lhs)), lf)
        for x, c in zip(r.rhs, stack):
            if b is None:
                break
            b = unify(x, c, b)
        if b is None or len(r.rhs) != len(stack):
            stats.backtracks += 1
            continue
        stats.rule_applications += 1
        yield resolve(r.lhs, b)


def generate(t: GenTables, cat: str, lf: Term, first: bool = False) -> Tuple[List[str], GenStats]:
    """Strings for ``lf`` (a ground logical form) of category ``cat``."""
    if cat != t.top:
        raise GenerationError(f"tables were compiled for {t.top}, not {cat}")
    stats = GenStats()
    out: List[str] = []
    for c in _run(t, 1, Struct(DUMMY_FUNCTOR, (lf,)), (), stats):
        b = unify(c.args[3], NIL)
        if b is None:
            continue
        items, tail = list_items(resolve(c.args[2], b))
        if tail != NIL or any(isinstance(w, Var) for w in items):
            continue
        s = " ".join(w.functor for w in items)
        if s not in out:
            out.append(s)
            if first:
                break
    return out, stats


@dataclass
class CompareRow:
    lf: str
    strings: List[str]
    shdg: GenStats
    tables: GenStats
    agree: bool


def compare(t: GenTables, g: Grammar, corpus: Sequence[Term]) -> List[CompareRow]:
    rows = []
    for lf in corpus:
        a, sa = shdg_generate(g, t.top, lf)
        b, sb = generate(t, t.top, lf)
        rows.append(CompareRow(canonical(lf), sorted(b), sa, sb, sorted(a) == sorted(b)))
    return rows


def format_compare(rows: Sequence[CompareRow], fmt: str = "text") -> str:
    head = ["lf", "strings", "shdg_applications", "shdg_choicepoints", "shdg_backtracks",
            "table_applications", "table_choicepoints", "table_backtracks", "agree"]
    body = [[r.lf, " | ".join(r.strings), r.shdg.rule_applications, r.shdg.choice_points,
             r.shdg.backtracks, r.tables.rule_applications, r.tables.choice_points,
             r.tables.backtracks, "yes" if r.agree else "no"] for r in rows]
    if fmt == "csv":
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerows(body)
        return buf.getvalue()
    if fmt == "json":
        import json
        return json.dumps([dict(zip(head, r)) for r in body], indent=2) + "\n"
    widths = [max(len(str(x)) for x in col) for col in zip(head, *body)] if body else [len(h) for h in head]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip() for row in [head] + body]
    return "\n".join(lines) + "\n"
