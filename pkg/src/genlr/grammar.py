"""Attributed logic grammars: loading, chain/non-chain classification,
normalization into functor-introducing / argument-filling form, and the
off-line parsability check.

Grammar files are line oriented::

    @top S.
    1: S(mod(X,Y)) --> S(X), QM(Y).
    2: S(Y) --> NP(X), VP(X^Y).   @flow {args: closed}
    NP(john) ==> "John".

Categories may be written in any case.  Constituent semantics are Prolog-style
terms; variables are scoped to one rule.  Word difference lists are threaded
automatically in surface order.

A constituent is the term ``c(Cat, Sem, W0, W)`` in plain rules and
``c(Cat, Sem, W0, W, A0, A)`` in normal form, where ``A0``/``A`` is the
difference list of pending arguments (``[]``/``[]`` when empty).
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .terms import (
    NIL, Struct, Term, TermParser, TermSyntaxError, Var, abstraction_depth, atom,
    core, format_term, make_list, tokenize, var,
)

__all__ = [
    "GrammarError", "GrammarRule", "Grammar", "NormalRule", "NormalGrammar",
    "parse_grammar", "load_grammar", "classify", "normalize",
    "check_offline_parsability", "constituent", "cat_of", "sem_of",
    "DUMMY_CAT", "DUMMY_FUNCTOR",
]

# Reserved names for the dummy start item; user grammars may not use them.
DUMMY_CAT = "$start"
DUMMY_FUNCTOR = "$top"


class GrammarError(ValueError):
    """Invalid grammar.  ``rule`` is the offending rule id when known."""

    def __init__(self, message: str, rule: Optional[int] = None, line: Optional[int] = None):
        where = []
        if rule is not None:
            where.append(f"rule {rule}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.rule = rule
        self.line = line


def constituent(cat: str, sem: Term, w0: Term, w: Term,
                a0: Optional[Term] = None, a: Optional[Term] = None) -> Struct:
    if a0 is None:
        return Struct("c", (atom(cat), sem, w0, w))
    return Struct("c", (atom(cat), sem, w0, w, a0, a))


def cat_of(c: Term) -> str:
    return c.args[0].functor


def sem_of(c: Term) -> Term:
    return c.args[1]


@dataclass
class GrammarRule:
    """A rule as written: quadruple constituents, RHS in surface order."""
    id: int
    lhs: Struct
    rhs: Tuple[Struct, ...] = ()
    words: Optional[Tuple[str, ...]] = None
    flow: Dict[str, object] = field(default_factory=dict)
    line: int = 0
    kind: str = ""          # "chain" | "non-chain", filled by classify
    head: Optional[int] = None

    @property
    def lexical(self) -> bool:
        return self.words is not None

    @property
    def cat(self) -> str:
        return cat_of(self.lhs)

    def __str__(self) -> str:
        lhs = f"{self.cat}({format_term(sem_of(self.lhs))})"
        if self.lexical:
            return f"{lhs} ==> \"{' '.join(self.words)}\""
        rhs = ", ".join(f"{cat_of(c)}({format_term(sem_of(c))})" for c in self.rhs)
        return f"{lhs} --> {rhs}"


@dataclass
class Grammar:
    rules: List[GrammarRule]
    top: str

    @property
    def phrasal(self) -> List[GrammarRule]:
        return [r for r in self.rules if not r.lexical]

    @property
    def lexicon(self) -> List[GrammarRule]:
        return [r for r in self.rules if r.lexical]

    def rule(self, rid: int) -> GrammarRule:
        for r in self.rules:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def categories(self) -> List[str]:
        seen: Dict[str, None] = {}
        for r in self.rules:
            seen.setdefault(r.cat)
            for c in r.rhs:
                seen.setdefault(cat_of(c))
        return list(seen)


# -- parsing -------------------------------------------------------------------

_FLOW_KEYS = {"head", "push", "args", "pass", "order"}


class _GrammarParser(TermParser):

    def constituent(self) -> Tuple[str, Term]:
        kind, value, pos = self.next()
        if kind not in ("atom", "var", "quoted"):
            raise self.error(f"expected a category, found {value or 'end of input'!r}", (kind, value, pos))
        cat = value[1:-1] if kind == "quoted" else value
        if cat.startswith("$"):
            raise self.error(f"category {cat!r} is reserved", (kind, value, pos))
        if self.at("("):
            self.next()
            sem = self.term()
            self.expect(")")
        else:
            sem = var("_")
        return cat, sem

    def flow_value(self):
        if self.at("["):
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.flow_atom())
                while self.at(","):
                    self.next()
                    items.append(self.flow_atom())
            self.expect("]")
            return items
        return self.flow_atom()

    def flow_atom(self):
        kind, value, pos = self.next()
        if kind == "atom" and value.isdigit():
            return int(value)
        if kind in ("atom", "var"):
            return value
        if kind == "quoted":
            return value[1:-1]
        raise self.error(f"bad flow value {value!r}", (kind, value, pos))

    def flow(self) -> Dict[str, object]:
        tok = self.next()
        if tok[1] != "flow":
            raise self.error(f"unknown annotation @{tok[1]}", tok)
        self.expect("{")
        out: Dict[str, object] = {}
        while not self.at("}"):
            key = self.next()
            if key[1] not in _FLOW_KEYS:
                raise self.error(f"unknown flow key {key[1]!r}", key)
            self.expect(":")
            out[key[1]] = self.flow_value()
            if self.at(","):
                self.next()
        self.expect("}")
        return out


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def parse_grammar(text: str) -> Grammar:
    """Parse grammar source; raises GrammarError with line information."""
    try:
        return _parse_grammar(text)
    except TermSyntaxError as e:
        raise GrammarError(f"syntax error: {e}", line=e.line) from None


def _parse_grammar(text: str) -> Grammar:
    p = _GrammarParser(text)
    rules: List[GrammarRule] = []
    pending: List[Tuple[Optional[int], GrammarRule]] = []
    top: Optional[str] = None
    while p.peek()[0] != "eof":
        p.fresh_scope()
        start = p.peek()
        if p.at("@"):
            p.next()
            tok = p.next()
            if tok[1] != "top":
                raise p.error(f"unknown directive @{tok[1]}", tok)
            top, _ = p.constituent()
            p.expect(".")
            continue
        explicit: Optional[int] = None
        if start[0] == "atom" and start[1].isdigit() and p.peek(1)[1] == ":":
            explicit = int(start[1])
            p.next()
            p.next()
        cat, sem = p.constituent()
        arrow = p.next()
        rule = GrammarRule(0, None, line=_line_of(text, start[2]))  # type: ignore[arg-type]
        if arrow[1] == "==>":
            kind, value, pos = p.next()
            if kind != "string":
                raise p.error("expected a quoted word after ==>", (kind, value, pos))
            words = tuple(value[1:-1].split())
            w = var("W")
            rule.lhs = constituent(cat, sem, make_list([atom(x) for x in words], w), w)
            rule.words = words
        elif arrow[1] == "-->":
            rhs = [p.constituent()]
            while p.at(","):
                p.next()
                rhs.append(p.constituent())
            ws = [var("W0")] + [var(f"W{i}") for i in range(1, len(rhs))] + [var("W")]
            rule.lhs = constituent(cat, sem, ws[0], ws[-1])
            rule.rhs = tuple(constituent(c, s, ws[i], ws[i + 1]) for i, (c, s) in enumerate(rhs))
        else:
            raise p.error(f"expected --> or ==>, found {arrow[1] or 'end of input'!r}", arrow)
        p.expect(".")
        if p.at("@") and p.peek(1)[1] == "flow":
            p.next()
            rule.flow = p.flow()
        pending.append((explicit, rule))

    if not pending:
        raise GrammarError("no rules")
    used = set()
    for explicit, rule in pending:
        if explicit is not None:
            if explicit in used:
                raise GrammarError(f"duplicate rule id {explicit}", rule=explicit, line=rule.line)
            used.add(explicit)
    nxt = max(used, default=0) + 1
    for explicit, rule in pending:
        if explicit is None:
            explicit, nxt = nxt, nxt + 1
        rule.id = explicit
        rules.append(rule)
    for rule in rules:
        for term in (rule.lhs,) + rule.rhs:
            _reject_reserved(term, rule)
        _check_flow_targets(rule)
    g = Grammar(rules, top or rules[0].cat)
    if g.top not in {r.cat for r in rules}:
        raise GrammarError(f"top category {g.top} has no rules")
    return g


def _reject_reserved(t: Term, rule: GrammarRule) -> None:
    if isinstance(t, Struct):
        if t.functor in (DUMMY_FUNCTOR, DUMMY_CAT):
            raise GrammarError(f"reserved symbol {t.functor!r}", rule=rule.id, line=rule.line)
        for a in t.args:
            _reject_reserved(a, rule)


def load_grammar(path: str) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def _resolve_ref(rule: GrammarRule, ref) -> int:
    """Flow reference (1-based index or RHS category) -> 0-based RHS index."""
    if isinstance(ref, int):
        if not 1 <= ref <= len(rule.rhs):
            raise GrammarError(f"unbound flow target {ref}", rule=rule.id, line=rule.line)
        return ref - 1
    hits = [i for i, c in enumerate(rule.rhs) if cat_of(c) == ref]
    if not hits:
        raise GrammarError(f"unknown category {ref!r} in flow annotation", rule=rule.id, line=rule.line)
    if len(hits) > 1:
        raise GrammarError(f"flow reference {ref!r} is ambiguous; use a position", rule=rule.id, line=rule.line)
    return hits[0]


def _check_flow_targets(rule: GrammarRule) -> None:
    for key in ("head", "pass"):
        if key in rule.flow:
            _resolve_ref(rule, rule.flow[key])
    for key in ("push", "order"):
        if key in rule.flow:
            refs = rule.flow[key]
            if not isinstance(refs, list):
                raise GrammarError(f"flow {key} must be a list", rule=rule.id, line=rule.line)
            for ref in refs:
                _resolve_ref(rule, ref)
    if rule.flow.get("args", "open") not in ("open", "closed"):
        raise GrammarError("flow args must be open or closed", rule=rule.id, line=rule.line)


# -- classification ------------------------------------------------------------

def head_candidates(rule: GrammarRule) -> List[int]:
    """RHS positions sharing the LHS semantics modulo abstraction prefixes."""
    target = core(sem_of(rule.lhs))
    return [i for i, c in enumerate(rule.rhs) if core(sem_of(c)) == target]


def classify(g: Grammar) -> Tuple[List[GrammarRule], List[GrammarRule]]:
    """Tag each rule chain / non-chain; return (chain, non_chain)."""
    chain, non_chain = [], []
    for r in g.rules:
        r.head = None
        if r.lexical:
            r.kind = "non-chain"
        elif "head" in r.flow:
            r.kind, r.head = "chain", _resolve_ref(r, r.flow["head"])
        else:
            hits = head_candidates(r)
            if len(hits) == 1:
                r.kind, r.head = "chain", hits[0]
            elif hits:
                r.kind = "chain"     # ambiguous; normalize insists on @flow head
            else:
                r.kind = "non-chain"
        (chain if r.kind == "chain" else non_chain).append(r)
    return chain, non_chain


# -- normal form ---------------------------------------------------------------

@dataclass(frozen=True)
class NormalRule:
    """Functor-introducing or argument-filling rule over sextuple constituents.

    For lexical entries ``arglist`` is the pending-argument list that becomes
    the right-hand side once the chain above has filled it.
    """
    id: int
    kind: str                       # "functor" | "argument"
    lhs: Struct
    rhs: Tuple[Struct, ...]
    arglist: Optional[Term] = None
    lexical: bool = False

    @property
    def cat(self) -> str:
        return cat_of(self.lhs)

    def as_term(self) -> Struct:
        return Struct("rule", (self.lhs, make_list(self.rhs), self.arglist if self.arglist is not None else NIL))


@dataclass
class NormalGrammar:
    rules: List[NormalRule]
    top: str
    source: Grammar

    @property
    def functor_rules(self) -> List[NormalRule]:
        return [r for r in self.rules if r.kind == "functor"]

    @property
    def argument_rules(self) -> List[NormalRule]:
        return [r for r in self.rules if r.kind == "argument"]

    def rule(self, rid: int) -> NormalRule:
        for r in self.rules:
            if r.id == rid:
                return r
        raise KeyError(rid)


def _sext(c: Struct, a0: Term = NIL, a: Term = NIL) -> Struct:
    return Struct("c", c.args[:4] + (a0, a))


def _argument_filling(r: GrammarRule) -> NormalRule:
    nonheads = [i for i in range(len(r.rhs)) if i != r.head]
    if "push" in r.flow:
        order = [_resolve_ref(r, x) for x in r.flow["push"]]  # type: ignore[union-attr]
        if sorted(order) != nonheads:
            raise GrammarError("flow push must list every non-head constituent once", rule=r.id, line=r.line)
    elif len(nonheads) > 1:
        raise GrammarError("missing flow annotation: push order for several non-head constituents",
                           rule=r.id, line=r.line)
    else:
        order = nonheads
    closed = r.flow.get("args") == "closed"
    a0, a = (NIL, NIL) if closed else (var("A0"), var("A"))
    pushed = make_list([r.rhs[i] for i in order], a0)
    head = _sext(r.rhs[r.head], pushed, a)
    return NormalRule(r.id, "argument", _sext(r.lhs, a0, a), (head,))


def _functor_introducing(r: GrammarRule) -> NormalRule:
    lhs_sem = sem_of(r.lhs)
    if r.lexical:
        a = var("A")
        return NormalRule(r.id, "functor", _sext(r.lhs, a, NIL), (), arglist=a, lexical=True)
    body = core(lhs_sem)
    if isinstance(body, Var):
        raise GrammarError("rule has a variable LHS logical form but no semantic head", rule=r.id, line=r.line)
    if "order" in r.flow:
        order = [_resolve_ref(r, x) for x in r.flow["order"]]  # type: ignore[union-attr]
        if sorted(order) != list(range(len(r.rhs))):
            raise GrammarError("flow order must list every RHS constituent once", rule=r.id, line=r.line)
    else:
        order = []
        for arg in body.args:
            hits = [i for i, c in enumerate(r.rhs) if core(sem_of(c)) == arg and i not in order]
            if len(hits) != 1:
                raise GrammarError("missing flow annotation: cannot align RHS with the LHS logical form",
                                   rule=r.id, line=r.line)
            order.append(hits[0])
        if sorted(order) != list(range(len(r.rhs))):
            raise GrammarError("missing flow annotation: RHS constituent without a LHS argument",
                               rule=r.id, line=r.line)
    target: Optional[int] = None
    if "pass" in r.flow:
        target = _resolve_ref(r, r.flow["pass"])
    elif abstraction_depth(lhs_sem) and r.flow.get("args") != "closed":
        prefix = lhs_sem.args[0]
        hits = [i for i, c in enumerate(r.rhs)
                if abstraction_depth(sem_of(c)) and sem_of(c).args[0] == prefix]
        if len(hits) != 1:
            raise GrammarError("missing flow annotation: which constituent receives the arguments",
                               rule=r.id, line=r.line)
        target = hits[0]
    a0, a = (var("A0"), var("A")) if target is not None else (NIL, NIL)
    rhs = tuple(_sext(r.rhs[i], a0, a) if i == target else _sext(r.rhs[i]) for i in order)
    return NormalRule(r.id, "functor", _sext(r.lhs, a0, a), rhs)


def normalize(g: Union[Grammar, NormalGrammar]) -> NormalGrammar:
    """Compile to normal form by following the argument flow of each rule."""
    if isinstance(g, NormalGrammar):
        return g
    classify(g)
    out = []
    for r in g.rules:
        if r.kind == "chain":
            if r.head is None:
                raise GrammarError("head constituent ambiguous; add @flow {head: ...}", rule=r.id, line=r.line)
            out.append(_argument_filling(r))
        else:
            out.append(_functor_introducing(r))
    return NormalGrammar(out, g.top, g)


# -- off-line parsability ------------------------------------------------------

def pass_through_edges(g: NormalGrammar) -> List[Tuple[str, str, int]]:
    """(lhs cat, head cat, rule id) for argument-filling rules that only pass
    the logical form along."""
    edges = []
    for r in g.argument_rules:
        head = r.rhs[0]
        if sem_of(head) == sem_of(r.lhs) and head.args[4] == r.lhs.args[4]:
            edges.append((r.cat, cat_of(head), r.id))
    return edges


def check_offline_parsability(g: NormalGrammar) -> Optional[List[str]]:
    """None if there is no purely argument-filling cycle, else a witness cycle
    as a list of categories whose first and last elements coincide."""
    graph: Dict[str, List[str]] = {}
    for a, b, _ in pass_through_edges(g):
        graph.setdefault(a, []).append(b)
    state: Dict[str, int] = {}
    path: List[str] = []

    def dfs(n: str) -> Optional[List[str]]:
        state[n] = 1
        path.append(n)
        for m in graph.get(n, ()):
            if state.get(m) == 1:
                return path[path.index(m):] + [m]
            if m not in state:
                found = dfs(m)
                if found:
                    return found
        path.pop()
        state[n] = 2
        return None

    for n in sorted(graph):
        if n not in state:
            found = dfs(n)
            if found:
                return found
    return None


def report_problems(g: Grammar, stream=sys.stderr) -> bool:
    """Validation report for the CLI; True when the grammar is usable."""
    try:
        ng = normalize(g)
    except GrammarError as e:
        print(f"error: {e}", file=stream)
        return False
    cycle = check_offline_parsability(ng)
    if cycle:
        print(f"error: purely argument-filling cycle {' -> '.join(cycle)}", file=stream)
        return False
    return True
