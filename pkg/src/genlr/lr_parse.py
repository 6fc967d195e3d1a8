"""SLR(1) table compiler and backtracking shift-reduce parser for the
context-free backbone of a grammar.

Lexical entries are not part of the tables: words are tagged with their
preterminal categories first, and those categories act as terminals.  A
category that has both lexical entries and phrasal rules is shifted as a
terminal and reached by goto as a nonterminal, through the same transition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .grammar import Grammar, cat_of
from .terms import NIL, Struct, Term, list_items, make_list, rename_apart, resolve, unify, var

__all__ = [
    "EOS", "CFG", "ParseItem", "ParseTables", "ParseError",
    "cfg_of", "compile_parse_tables", "parse", "reconstruct", "derivation_rules",
    "format_states", "format_table",
]

EOS = "eos"
START = "S'"


class ParseError(ValueError):
    pass


@dataclass
class CFG:
    """Context-free projection: rule id -> (lhs, rhs), plus the lexicon."""
    rules: Dict[int, Tuple[str, Tuple[str, ...]]]
    top: str
    lexicon: Dict[str, List[Tuple[str, int]]]     # word -> [(category, lexical rule id)]

    @property
    def nonterminals(self) -> Set[str]:
        return {lhs for lhs, _ in self.rules.values()}

    @property
    def terminals(self) -> Set[str]:
        return {c for tags in self.lexicon.values() for c, _ in tags}


def cfg_of(g: Grammar) -> CFG:
    lexicon: Dict[str, List[Tuple[str, int]]] = {}
    for r in g.lexicon:
        if len(r.words) != 1:
            raise ParseError(f"lexical rule {r.id} must be exactly one word for parsing")
        lexicon.setdefault(r.words[0], []).append((r.cat, r.id))
    rules = {r.id: (r.cat, tuple(cat_of(c) for c in r.rhs)) for r in g.phrasal}
    return CFG(rules, g.top, lexicon)


ParseItem = Tuple[int, int]       # (rule id, dot); rule 0 is S' -> top


@dataclass
class ParseTables:
    cfg: CFG
    states: List[Tuple[ParseItem, ...]]               # index 0 is state 1
    action: Dict[Tuple[int, str], List[Tuple[str, int]]] = field(default_factory=dict)
    goto: Dict[Tuple[int, str], int] = field(default_factory=dict)

    def rule(self, rid: int) -> Tuple[str, Tuple[str, ...]]:
        return (START, (self.cfg.top,)) if rid == 0 else self.cfg.rules[rid]

    def conflicts(self) -> Dict[Tuple[int, str], List[Tuple[str, int]]]:
        return {k: v for k, v in self.action.items() if len(v) > 1}


def _first_sets(cfg: CFG) -> Dict[str, Set[str]]:
    first: Dict[str, Set[str]] = {t: {t} for t in cfg.terminals}
    for nt in cfg.nonterminals:
        first.setdefault(nt, set())
    changed = True
    while changed:
        changed = False
        for lhs, rhs in cfg.rules.values():
            if rhs:
                add = first.get(rhs[0], set()) - first[lhs]
                if add:
                    first[lhs] |= add
                    changed = True
    return first


def _follow_sets(cfg: CFG, first: Dict[str, Set[str]]) -> Dict[str, Set[str]]:
    follow: Dict[str, Set[str]] = {s: set() for s in first}
    follow[cfg.top].add(EOS)
    changed = True
    while changed:
        changed = False
        for lhs, rhs in cfg.rules.values():
            for i, sym in enumerate(rhs):
                add = first.get(rhs[i + 1], set()) if i + 1 < len(rhs) else follow[lhs]
                if add - follow[sym]:
                    follow[sym] |= add
                    changed = True
    return follow


def compile_parse_tables(cfg: CFG) -> ParseTables:
    """Build the item sets and SLR(1) action/goto tables.

    States are numbered from 1.  The state reached from state 1 over the top
    symbol is numbered 2; the rest are numbered depth first, taking the
    symbols after the dot in item order.
    """
    rules = dict(cfg.rules)
    rules[0] = (START, (cfg.top,))
    by_lhs: Dict[str, List[int]] = {}
    for rid in sorted(cfg.rules):
        by_lhs.setdefault(rules[rid][0], []).append(rid)

    def closure(kernel: Sequence[ParseItem]) -> Tuple[ParseItem, ...]:
        items = list(kernel)
        i = 0
        while i < len(items):
            rid, dot = items[i]
            rhs = rules[rid][1]
            if dot < len(rhs):
                for r2 in by_lhs.get(rhs[dot], ()):
                    if (r2, 0) not in items:
                        items.append((r2, 0))
            i += 1
        return tuple(items)

    def symbols(state: Tuple[ParseItem, ...]) -> List[str]:
        out: List[str] = []
        for rid, dot in state:
            rhs = rules[rid][1]
            if dot < len(rhs) and rhs[dot] not in out:
                out.append(rhs[dot])
        return out

    def advance(state, sym) -> Tuple[ParseItem, ...]:
        return closure([(rid, dot + 1) for rid, dot in state
                        if dot < len(rules[rid][1]) and rules[rid][1][dot] == sym])

    states: List[Tuple[ParseItem, ...]] = []
    index: Dict[frozenset, int] = {}
    trans: Dict[Tuple[int, str], int] = {}

    def number(state) -> Tuple[int, bool]:
        key = frozenset(state)
        if key in index:
            return index[key], False
        states.append(state)
        index[key] = len(states)
        return len(states), True

    processed: Set[int] = set()

    def visit(sid: int) -> None:
        processed.add(sid)
        for sym in symbols(states[sid - 1]):
            tid, new = number(advance(states[sid - 1], sym))
            trans[(sid, sym)] = tid
            if new:
                visit(tid)

    number(closure([(0, 0)]))
    number(advance(states[0], cfg.top))
    visit(1)
    while len(processed) < len(states):
        visit(min(set(range(1, len(states) + 1)) - processed))

    first = _first_sets(cfg)
    follow = _follow_sets(cfg, first)
    tables = ParseTables(cfg, states)
    terminals, nonterminals = cfg.terminals, cfg.nonterminals
    for (sid, sym), tid in trans.items():
        if sym in terminals:
            tables.action.setdefault((sid, sym), []).append(("s", tid))
        if sym in nonterminals:
            tables.goto[(sid, sym)] = tid
    for sid, state in enumerate(states, 1):
        for rid, dot in state:
            if dot == len(rules[rid][1]):
                if rid == 0:
                    tables.action.setdefault((sid, EOS), []).append(("acc", 0))
                else:
                    for a in sorted(follow[rules[rid][0]]):
                        tables.action.setdefault((sid, a), []).append(("r", rid))
    for acts in tables.action.values():
        acts.sort(key=lambda a: ({"s": 0, "r": 1, "acc": 2}[a[0]], a[1]))
    return tables


# -- parsing -------------------------------------------------------------------

Tree = tuple    # (rule id, child, ...) ; lexical leaves are (rule id, word)


def parse(tables: ParseTables, tokens: Sequence[str], limit: Optional[int] = None) -> List[Tree]:
    """All derivations of ``tokens``, found by backtracking over conflicts and
    ambiguous tags (shift before reduce, lower rule ids first)."""
    cfg = tables.cfg
    tags: List[List[Tuple[str, int]]] = []
    for w in tokens:
        if w not in cfg.lexicon:
            raise ParseError(f"unknown word {w!r}")
        tags.append(cfg.lexicon[w])
    results: List[Tree] = []
    max_reduces = 2 * len(cfg.rules) + 2

    def step(states: Tuple[int, ...], nodes: Tuple[Tree, ...], pos: int, reduces: int) -> Iterator[Tree]:
        sid = states[-1]
        options = tags[pos] if pos < len(tokens) else [(EOS, 0)]
        for cat, lex_id in options:
            for kind, arg in tables.action.get((sid, cat), ()):
                if kind == "acc":
                    yield nodes[-1]
                elif kind == "s":
                    yield from step(states + (arg,), nodes + ((lex_id, tokens[pos]),), pos + 1, 0)
                elif reduces < max_reduces:
                    lhs, rhs = tables.rule(arg)
                    n = len(rhs)
                    base = states[:-n]
                    target = tables.goto.get((base[-1], lhs))
                    if target is None:
                        continue
                    yield from step(base + (target,), nodes[:-n] + ((arg,) + nodes[-n:],), pos, reduces + 1)

    for tree in step((1,), (), 0, 0):
        if tree not in results:
            results.append(tree)
            if limit and len(results) >= limit:
                break
    return results


def derivation_rules(tree: Tree) -> List[int]:
    """Phrasal rule ids of a derivation in pre-order."""
    if len(tree) == 2 and isinstance(tree[1], str):
        return []
    out = [tree[0]]
    for child in tree[1:]:
        out += derivation_rules(child)
    return out


def reconstruct(g: Grammar, tree: Tree) -> Tuple[List[str], Term]:
    """Rebuild (words, logical form) of a derivation through the attributed rules."""
    def build(node: Tree) -> Term:
        rule = g.rule(node[0])
        if rule.lexical:
            return rename_apart(rule.lhs)
        t = rename_apart(Struct("r", (rule.lhs,) + rule.rhs))
        b: Dict = {}
        for c, child in zip(t.args[1:], node[1:]):
            b = unify(c, build(child), b)
            if b is None:
                raise ParseError(f"semantic mismatch under rule {rule.id}")
        return resolve(t.args[0], b)

    top = build(tree)
    b = unify(top.args[3], NIL)
    words, tail = list_items(resolve(top.args[2], b))
    return [w.functor for w in words], resolve(top.args[1], b)


# -- listings ------------------------------------------------------------------

def format_states(tables: ParseTables) -> str:
    lines = []
    for sid, state in enumerate(tables.states, 1):
        lines.append(f"State {sid}")
        for rid, dot in state:
            lhs, rhs = tables.rule(rid)
            syms = list(rhs[:dot]) + ["."] + list(rhs[dot:])
            lines.append(f"  {lhs} => {' '.join(syms)}")
    return "\n".join(lines)


def table_columns(tables: ParseTables) -> List[str]:
    cols: List[str] = []
    for rid in sorted(tables.cfg.rules):
        for sym in tables.cfg.rules[rid][1]:
            if sym not in cols:
                cols.append(sym)
    for sym in sorted(tables.cfg.terminals | tables.cfg.nonterminals):
        if sym not in cols:
            cols.append(sym)
    return cols + [EOS]


def cells(tables: ParseTables) -> Dict[Tuple[int, str], str]:
    """Printable cell text, e.g. ``s3``, ``r2``, ``acc``, ``g4``."""
    out: Dict[Tuple[int, str], List[str]] = {}
    for (sid, sym), acts in tables.action.items():
        out.setdefault((sid, sym), []).extend("acc" if k == "acc" else f"{k}{a}" for k, a in acts)
    for (sid, sym), tid in tables.goto.items():
        text = f"g{tid}"
        if f"s{tid}" not in out.get((sid, sym), []):
            out.setdefault((sid, sym), []).append(text)
    return {k: "/".join(v) for k, v in out.items()}


def format_table(tables: ParseTables) -> str:
    cols = table_columns(tables)
    cell = cells(tables)
    width = max([4] + [len(c) + 1 for c in cols] + [len(v) + 1 for v in cell.values()])
    lines = [" " * 4 + "".join(c.ljust(width) for c in cols)]
    for sid in range(1, len(tables.states) + 1):
        row = "".join(cell.get((sid, c), "").ljust(width) for c in cols)
        lines.append(f"{sid:<4}{row}".rstrip())
    return "\n".join(lines)
