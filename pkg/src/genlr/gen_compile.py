"""Compilation of the inverted grammar into generation tables.

A state is a set of items: an inverted rule whose left-hand logical form has
been instantiated by the lookahead key that selected it, plus a dot that marks
an argument position of that logical form.  All items of a state share the
dot.  From a state at position ``i`` a lookahead key ``k`` (a truncated
logical form) leads to

* ``descend(S, k)``: rules invoked for the position-``i`` constituents whose
  logical form can match ``k``, dot at the first argument;
* ``goto(S, k)``: the items of ``S`` whose position-``i`` constituent can have
  ``k`` as logical form, dot advanced.

A state whose dot is past the last argument is reductive; its reduce entries
are the rules of its items.  Keys are chosen per (state, functor) by one of
three modes: a fixed uniform depth, iterative deepening towards deterministic
reductive states, or deepening guided by training logical forms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .grammar import DUMMY_CAT, DUMMY_FUNCTOR, NormalGrammar, cat_of, constituent, sem_of
from .inversion import FunctorKey, InvertedRule, Inverter, format_constituent
from .terms import (
    NIL, Bindings, DepthAssignment, Struct, Term, Var, canonical, core, functor_key,
    list_items, make_list, parse_term, rename_apart, resolve, size, subsumes, term_vars,
    truncate, unify, var, with_core,
)
from .terms import _quote

__all__ = [
    "CompileError", "Mode", "GenState", "GenTables", "compile_tables", "lf_typing",
    "initial_state", "nondeterminism_report", "save_tables", "load_tables",
    "dump_tables", "parse_tables", "format_state", "format_entries", "assignments",
]

DEFAULT_MAX_BUDGET = 8
DEFAULT_DEPTH = 1


class CompileError(RuntimeError):
    pass


@dataclass(frozen=True)
class Mode:
    """``fixed`` (uniform ``depth``), ``auto`` or ``examples`` key selection."""
    kind: str = "fixed"
    depth: int = 1
    max_budget: int = DEFAULT_MAX_BUDGET
    default_depth: int = DEFAULT_DEPTH
    fallback: bool = True
    examples: Tuple[Term, ...] = ()

    @classmethod
    def fixed(cls, depth: int) -> "Mode":
        return cls("fixed", depth=depth)

    @classmethod
    def auto(cls, max_budget: int = DEFAULT_MAX_BUDGET, fallback: bool = True) -> "Mode":
        return cls("auto", max_budget=max_budget, fallback=fallback)

    @classmethod
    def from_examples(cls, examples: Iterable[Term], max_budget: int = DEFAULT_MAX_BUDGET,
                      default_depth: int = DEFAULT_DEPTH) -> "Mode":
        return cls("examples", max_budget=max_budget, default_depth=default_depth,
                   examples=tuple(examples))


# -- helpers -------------------------------------------------------------------

def strip_words(t: Term) -> Term:
    """Replace every word position of every constituent by a fresh variable."""
    if isinstance(t, Var):
        return t
    if t.functor == "c" and len(t.args) in (4, 6):
        a = list(t.args)
        a[1] = strip_words(a[1])
        a[2], a[3] = var("_"), var("_")
        if len(a) == 6:
            a[4], a[5] = strip_words(a[4]), strip_words(a[5])
        return Struct("c", tuple(a))
    if not t.args:
        return t
    return Struct(t.functor, tuple(strip_words(x) for x in t.args))


def _without_words(t: Term) -> Term:
    """Word positions replaced by ``[]``, for naming the visible variables."""
    if isinstance(t, Var) or not t.args:
        return t
    args = tuple(_without_words(a) for a in t.args)
    if t.functor == "c" and len(args) in (4, 6):
        args = args[:2] + (NIL, NIL) + args[4:]
    return Struct(t.functor, args)


def _rule_parts(term: Term) -> Tuple[Struct, List[Struct]]:
    return term.args[0], list_items(term.args[1])[0]


def _lf(c: Term, b: Optional[Bindings] = None) -> Term:
    return core(resolve(sem_of(c), b))


def _template(key: FunctorKey) -> Struct:
    return Struct(key[0], tuple(var("_") for _ in range(key[1])))


def assignments(max_arity: int, budget: int) -> List[DepthAssignment]:
    """Prefix-closed path sets containing the root, up to ``budget`` nodes,
    ordered by total then leftmost-deepest first."""
    return list(_assignments(max_arity, budget))


_ASSIGNMENT_CACHE: Dict[Tuple[int, int], Tuple[DepthAssignment, ...]] = {}


def _assignments(max_arity: int, budget: int) -> Tuple[DepthAssignment, ...]:
    hit = _ASSIGNMENT_CACHE.get((max_arity, budget))
    if hit is not None:
        return hit
    out: List[DepthAssignment] = []
    level = {frozenset({()})}
    for _ in range(budget):
        ordered = sorted((DepthAssignment(p) for p in level), key=lambda a: a.sort_key())
        out.extend(ordered)
        nxt = set()
        for paths in level:
            for p in paths:
                for i in range(max_arity):
                    c = p + (i,)
                    if c not in paths:
                        nxt.add(paths | {c})
        level = nxt
    _ASSIGNMENT_CACHE[(max_arity, budget)] = tuple(out)
    return _ASSIGNMENT_CACHE[(max_arity, budget)]


def _paths_of(t: Term, prefix: Tuple[int, ...] = ()) -> Set[Tuple[int, ...]]:
    if isinstance(t, Var):
        return set()
    out = {prefix}
    for i, a in enumerate(t.args):
        out |= _paths_of(a, prefix + (i,))
    return out


def _inspected(t: Term, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """(path, arity) of every non-variable node."""
    if isinstance(t, Var):
        return
    yield prefix, len(t.args)
    for i, a in enumerate(t.args):
        yield from _inspected(a, prefix + (i,))


def _subassignments(paths: Set[Tuple[int, ...]], budget: int) -> List[DepthAssignment]:
    """Prefix-closed subsets of ``paths`` containing the root, up to budget."""
    out: List[DepthAssignment] = []
    level = {frozenset({()})} if () in paths else set()
    seen = set(level)
    while level:
        out.extend(DepthAssignment(p) for p in level)
        nxt = set()
        for cur in level:
            if len(cur) >= budget:
                continue
            for p in paths - cur:
                if p[:-1] in cur:
                    s = cur | {p}
                    if s not in seen:
                        seen.add(s)
                        nxt.add(s)
        level = nxt
    return sorted(out, key=lambda a: a.sort_key())


# -- typing --------------------------------------------------------------------

def lf_typing(g: NormalGrammar) -> Dict[str, str]:
    """Map each interchangeable lexical atom to its class representative.

    An atom is typed when it only ever occurs as the whole logical form of
    lexical entries; atoms with the same categories of entries (with
    multiplicity) form one class, represented by the alphabetically first.
    """
    entries: Dict[str, List[str]] = {}
    excluded: Set[str] = set()

    def scan(t: Term) -> None:
        if isinstance(t, Var):
            return
        if not t.args:
            excluded.add(t.functor)
        for a in t.args:
            scan(a)

    for r in g.rules:
        parts = [r.lhs] + list(r.rhs)
        for c in parts:
            sem = sem_of(c)
            if r.lexical and c is r.lhs and isinstance(sem, Struct) and not sem.args:
                entries.setdefault(sem.functor, []).append(r.cat)
            else:
                scan(sem)
    classes: Dict[Tuple[str, ...], List[str]] = {}
    for a, cats in entries.items():
        if a not in excluded and a != "[]":
            classes.setdefault(tuple(sorted(cats)), []).append(a)
    out: Dict[str, str] = {}
    for members in classes.values():
        rep = min(members)
        for m in members:
            out[m] = rep
    return out


def typed(t: Term, types: Dict[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    if not t.args:
        rep = types.get(t.functor)
        return Struct(rep) if rep and rep != t.functor else t
    return Struct(t.functor, tuple(typed(a, types) for a in t.args))


# -- states and tables ---------------------------------------------------------

@dataclass
class GenState:
    id: int
    pos: int
    items: List[Tuple[str, Struct]]            # (rule hash, word-free rule term)
    examples: Dict[str, Term] = field(default_factory=dict)   # canonical text -> typed LHS LF

    @property
    def arity(self) -> int:
        return len(_rule_parts(self.items[0][1])[1]) if self.items else 0

    @property
    def reductive(self) -> bool:
        return self.pos >= self.arity

    def signature(self) -> Tuple:
        return (self.pos, tuple(sorted(h + " " + canonical(t) for h, t in self.items)))

    def hashes(self) -> Tuple[str, ...]:
        return tuple(sorted(h for h, _ in self.items))


class _Goals(tuple):
    """Goal constituents of one state position, tagged with a canonical signature."""
    sig: Tuple[str, ...] = ()


Entry = Tuple[Term, int]      # (lookahead key, target state)


@dataclass
class GenTables:
    top: str
    rules: Dict[str, InvertedRule]
    states: Dict[int, GenState]
    descend: Dict[int, List[Entry]] = field(default_factory=dict)
    goto: Dict[int, List[Entry]] = field(default_factory=dict)
    reduce: Dict[int, List[str]] = field(default_factory=dict)
    alias: Dict[Tuple[str, str], str] = field(default_factory=dict)
    types: Dict[str, str] = field(default_factory=dict)
    start_rule: str = ""

    def lookup(self, table: Dict[int, List[Entry]], sid: int, lf: Term) -> Optional[Tuple[Term, int]]:
        """Most specific key of ``sid`` subsuming the typed ``lf``."""
        t = typed(lf, self.types)
        best = None
        for key, target in table.get(sid, ()):
            if subsumes(key, t):
                rank = (-size(key), target)
                if best is None or rank < best[0]:
                    best = (rank, key, target)
        return None if best is None else (best[1], best[2])

    def reduce_rules(self, sid: int, lf: Term) -> List[InvertedRule]:
        out = []
        for h in self.reduce.get(sid, ()):
            if isinstance(lf, Struct) and not lf.args:
                h = self.alias.get((h, lf.functor), h)
            out.append(self.rules[h])
        return out


def nondeterminism_report(tables: GenTables) -> Dict[int, int]:
    """Reduce count per reductive state."""
    return {s: len(hs) for s, hs in sorted(tables.reduce.items())}


def _start_rule(top: str) -> InvertedRule:
    x, w0, w = var("X"), var("W0"), var("W")
    lhs = constituent(DUMMY_CAT, Struct(DUMMY_FUNCTOR, (x,)), w0, w, NIL, NIL)
    return InvertedRule(lhs, (constituent(top, x, w0, w, NIL, NIL),), ())


def initial_state(g: NormalGrammar) -> GenState:
    r = _start_rule(g.top)
    return GenState(1, 0, [(r.hash, strip_words(r.as_term()))])


# -- compiler ------------------------------------------------------------------

class _Compiler:
    def __init__(self, g: NormalGrammar, mode: Mode, inverter: Optional[Inverter] = None):
        self.g = g
        self.mode = mode
        self.inv = inverter or Inverter(g)
        self.types = lf_typing(g)
        self.functors = [k for k in self.inv.functors
                         if not (k[1] == 0 and self.types.get(k[0], k[0]) != k[0])]
        self.max_arity = max([a for _, a in self.functors] + [1])
        self.rules: Dict[str, InvertedRule] = {}
        self.alias: Dict[Tuple[str, str], str] = {}
        self._viable: Dict[str, bool] = {}
        self._keys: Dict[Tuple[str, DepthAssignment, FunctorKey], List[Term]] = {}
        self._invoked: Dict[str, List[Tuple[str, Struct]]] = {}
        self._texts: Dict[Tuple, List[Tuple[str, Term]]] = {}
        self._count: Dict[Tuple, int] = {}
        self.states: Dict[int, GenState] = {}
        self.by_sig: Dict[Tuple, int] = {}
        self.redirect: Dict[int, int] = {}
        self.descend: Dict[int, List[Entry]] = {}
        self.goto: Dict[int, List[Entry]] = {}
        self.reduce: Dict[int, List[str]] = {}
        self.expanded: Set[int] = set()
        self.queue: List[int] = []
        self.members: Dict[str, List[str]] = {}
        for a, rep in self.types.items():
            self.members.setdefault(rep, []).append(a)

    # rule invocation ----------------------------------------------------------

    def _generic(self, goal: Struct) -> Struct:
        return Struct("c", (goal.args[0], with_core(sem_of(goal), var("L"))) + goal.args[2:])

    def _instances(self, goal: Struct, key: Term) -> Iterator[Tuple[str, Struct, List[Struct], Term]]:
        """Rules for ``goal`` whose logical form unifies with ``key``:
        (hash, instantiated word-free rule term, rhs, instantiated key)."""
        fk = functor_key(key)
        if fk is None:
            return
        generic = self._generic(goal)
        for gr in self.inv.invert_for(generic, fk):
            h = gr.hash
            if h not in self.rules:
                self.rules[h] = gr
                self._note_alias(generic, gr)
            term = strip_words(rename_apart(gr.as_term()))
            lhs, rhs = _rule_parts(term)
            b = unify(lhs, goal)
            if b is None:
                continue
            k = rename_apart(key)
            b = unify(_lf(lhs, b), k, b)
            if b is None:
                continue
            yield h, resolve(term, b), [resolve(c, b) for c in rhs], resolve(k, b)

    def _note_alias(self, generic: Struct, gr: InvertedRule) -> None:
        lf = gr.lf
        if not isinstance(lf, Struct) or lf.args or lf.functor not in self.members:
            return
        rep = lf.functor
        same = [r for r in self.inv.invert_for(generic, (rep, 0)) if r.chain[:-1] == gr.chain[:-1]]
        idx = [r.hash for r in same].index(gr.hash) if gr.hash in [r.hash for r in same] else 0
        for m in self.members[rep]:
            if m == rep:
                continue
            cands = [r for r in self.inv.invert_for(generic, (m, 0)) if r.chain[:-1] == gr.chain[:-1]]
            if idx < len(cands):
                self.rules.setdefault(cands[idx].hash, cands[idx])
                self.alias[(gr.hash, m)] = cands[idx].hash

    def viable(self, c: Struct, t: Term) -> bool:
        """Can constituent ``c`` have a logical form that is an instance of ``t``?"""
        if isinstance(t, Var):
            return True
        memo = canonical(Struct("v", (c, t)))
        hit = self._viable.get(memo)
        if hit is None:
            hit = False
            for _, _, rhs, k in self._instances(c, t):
                if all(self.viable(x, a) for x, a in zip(rhs, k.args)):
                    hit = True
                    break
            self._viable[memo] = hit
        return hit

    def invoke(self, goal: Struct, key: Term) -> List[Tuple[str, Struct]]:
        memo = canonical(Struct("i", (goal, key)))
        hit = self._invoked.get(memo)
        if hit is None:
            hit = [(h, term) for h, term, rhs, k in self._instances(goal, key)
                   if all(self.viable(x, a) for x, a in zip(rhs, k.args))]
            self._invoked[memo] = hit
        return hit

    def keys_for(self, c: Struct, a: DepthAssignment,
                 fk: Optional[FunctorKey] = None) -> List[Tuple[str, Term]]:
        """Truncations under ``a`` of the logical forms ``c`` may have, with
        their don't-care canonical texts."""
        if not a:
            return [("_", var("_"))]
        memo = (canonical(c), a, fk)
        hit = self._keys.get(memo)
        if hit is not None:
            return hit
        out: Dict[str, Term] = {}
        for f in ([fk] if fk else self.functors):
            plain = f[0] not in (".", "^")
            for _, _, rhs, k in self._instances(c, _template(f)):
                subs = [self.keys_for(x, a.child(j)) for j, x in enumerate(rhs)]
                for combo in itertools.product(*subs):
                    key = Struct(f[0], tuple(rename_apart(x) for _, x in combo))
                    if plain:
                        text = _quote(f[0]) + ("(" + ",".join(t for t, _ in combo) + ")" if combo else "")
                    else:
                        text = canonical(key, dontcare=True)
                    out.setdefault(text, key)
        hit = [(t, out[t]) for t in sorted(out)]
        self._keys[memo] = hit
        return hit

    # state store ----------------------------------------------------------------

    def resolve_id(self, sid: int) -> int:
        while sid in self.redirect:
            sid = self.redirect[sid]
        return sid

    def add_state(self, pos: int, items: List[Tuple[str, Struct]], examples: Dict[str, Term]) -> int:
        st = GenState(0, pos, items)
        sig = st.signature()
        sid = self.by_sig.get(sig)
        if sid is None:
            for other in self.states.values():
                if other.pos == pos and other.hashes() == st.hashes() and self._subsumes(other, st):
                    sid = other.id
                    break
        if sid is not None:
            self._merge_examples(sid, examples)
            return sid
        st.id = len(self.states) + len(self.redirect) + 1
        st.examples = dict(examples)
        for other in list(self.states.values()):
            if other.pos == pos and other.hashes() == st.hashes() and self._subsumes(st, other):
                # the new state is more general: it replaces the old one
                self.redirect[other.id] = st.id
                del self.states[other.id]
                for k, v in other.examples.items():
                    st.examples.setdefault(k, v)
                for table in (self.descend, self.goto, self.reduce):
                    table.pop(other.id, None)
        self.states[st.id] = st
        self.by_sig = {s.signature(): s.id for s in self.states.values()}
        self.queue.append(st.id)
        return st.id

    @staticmethod
    def _subsumes(general: GenState, specific: GenState) -> bool:
        def joint(s: GenState) -> Term:
            return make_list(t for _, t in sorted(s.items, key=lambda x: (x[0], canonical(x[1]))))
        return subsumes(joint(general), joint(specific))

    def _merge_examples(self, sid: int, examples: Dict[str, Term]) -> None:
        st = self.states[sid]
        new = {k: v for k, v in examples.items() if k not in st.examples}
        if new:
            st.examples.update(new)
            if sid in self.expanded and sid not in self.queue:
                self.queue.append(sid)

    # expansion --------------------------------------------------------------------

    def run(self) -> GenTables:
        first = initial_state(self.g)
        start = _start_rule(self.g.top)
        self.rules[start.hash] = start
        exs = {}
        for e in self.mode.examples:
            t = Struct(DUMMY_FUNCTOR, (typed(e, self.types),))
            exs[canonical(t)] = t
        self.add_state(0, first.items, exs)
        while self.queue:
            sid = self.queue.pop(0)
            if sid in self.states:
                self.expand(self.states[sid])
        return self.finish(start.hash)

    def expand(self, st: GenState) -> None:
        self.expanded.add(st.id)
        if st.reductive:
            self.reduce[st.id] = sorted({h for h, _ in st.items})
            return
        goals: Dict[str, Struct] = {}
        for _, term in st.items:
            c = _rule_parts(term)[1][st.pos]
            goals.setdefault(canonical(c), c)
        goal_list = _Goals(goals[k] for k in sorted(goals))
        goal_list.sig = tuple(sorted(goals))
        exs = [(canonical(e), e) for e in st.examples.values()]
        keys: List[Term] = []
        for fk in self.functors:
            if not any(True for c in goal_list for _ in self._instances(c, _template(fk))):
                continue
            sub = [e.args[st.pos] for _, e in exs
                   if isinstance(e.args[st.pos], Struct) and functor_key(e.args[st.pos]) == fk]
            keys.extend(self.choose_keys(st, goal_list, fk, sub))
        descend: List[Entry] = []
        goto: List[Entry] = []
        for key in keys:
            d_items = self.descend_items(goal_list, key)
            g_items = self.goto_items(st, key)
            if not d_items or not g_items:
                continue
            d_ex: Dict[str, Term] = {}
            g_ex: Dict[str, Term] = {}
            for text, e in exs:
                a = e.args[st.pos]
                if self._route(keys, a) is key:
                    d_ex[canonical(a)] = a
                    g_ex[text] = e
            d = self.add_state(0, d_items, d_ex)
            g = self.add_state(st.pos + 1, g_items, g_ex)
            descend.append((key, d))
            goto.append((key, g))
        if st.id in self.states:
            self.descend[st.id] = descend
            self.goto[st.id] = goto

    @staticmethod
    def _route(keys: List[Term], a: Term) -> Optional[Term]:
        best = None
        for k in keys:
            if subsumes(k, a) and (best is None or size(k) > size(best)):
                best = k
        return best

    def descend_items(self, goals: Sequence[Struct], key: Term) -> List[Tuple[str, Struct]]:
        out: Dict[str, Tuple[str, Struct]] = {}
        for c in goals:
            for h, term in self.invoke(c, key):
                out.setdefault(h + " " + canonical(term), (h, term))
        return [out[k] for k in sorted(out)]

    def goto_items(self, st: GenState, key: Term) -> List[Tuple[str, Struct]]:
        out: Dict[str, Tuple[str, Struct]] = {}
        for h, term in st.items:
            c = _rule_parts(term)[1][st.pos]
            k = rename_apart(key)
            b = unify(_lf(c), k)
            if b is None or not self.viable(resolve(c, b), k):
                continue
            t = resolve(term, b)
            out.setdefault(h + " " + canonical(t), (h, t))
        return [out[k] for k in sorted(out)]

    def count(self, goals: Sequence[Struct], key: Term, text: Optional[str] = None) -> int:
        memo = (getattr(goals, "sig", None), text or canonical(key, dontcare=True))
        hit = self._count.get(memo) if memo[0] is not None else None
        if hit is None:
            hit = len(self.descend_items(goals, key))
            if memo[0] is not None:
                self._count[memo] = hit
        return hit

    # key selection ---------------------------------------------------------------

    def choose_keys(self, st: GenState, goals: Sequence[Struct], fk: FunctorKey,
                    examples: Sequence[Term]) -> List[Term]:
        mode = self.mode
        if mode.kind == "fixed":
            return self.keys_at(goals, DepthAssignment.uniform(max(mode.depth, 1), self.max_arity), fk)
        if mode.kind == "auto":
            return self.auto_keys(st, goals, fk)
        default = self.keys_at(goals, DepthAssignment.uniform(max(mode.default_depth, 1), self.max_arity), fk)
        if not examples:
            return default
        chosen = self.example_keys(goals, fk, examples)
        texts = {canonical(k, dontcare=True) for k in chosen}
        return chosen + [k for k in default if canonical(k, dontcare=True) not in texts]

    def keys_at(self, goals: Sequence[Struct], a: DepthAssignment, fk: FunctorKey) -> List[Term]:
        return [k for _, k in self.texts_at(goals, a, fk)]

    def texts_at(self, goals: Sequence[Struct], a: DepthAssignment,
                 fk: FunctorKey) -> List[Tuple[str, Term]]:
        """Keys under ``a`` for all goals, with their canonical texts."""
        memo = (getattr(goals, "sig", None), a, fk)
        hit = self._texts.get(memo) if memo[0] is not None else None
        if hit is None:
            out: Dict[str, Term] = {}
            for c in goals:
                for t, k in self.keys_for(c, a, fk):
                    out.setdefault(t, k)
            hit = [(t, out[t]) for t in sorted(out)]
            if memo[0] is not None:
                self._texts[memo] = hit
        return hit

    def auto_keys(self, st: GenState, goals: Sequence[Struct], fk: FunctorKey) -> List[Term]:
        tolerance = 1
        limit = len(self.rules_for(goals, fk)) + 1
        while True:
            found = self._deepen(goals, fk, tolerance)
            if found is not None:
                return found
            if not self.mode.fallback:
                raise CompileError(
                    f"state {st.id}: no lookahead within budget {self.mode.max_budget} makes "
                    f"{fk[0]}/{fk[1]} deterministic")
            tolerance += 1
            if tolerance > limit:
                raise CompileError(f"state {st.id}: tolerance exceeded the number of rules for {fk[0]}/{fk[1]}")

    def _deepen(self, goals: Sequence[Struct], fk: FunctorKey, tolerance: int) -> Optional[List[Term]]:
        """First assignment, by budget then leftmost-deepest, whose keys all
        invoke at most ``tolerance`` rules.

        A passing superset of a failing assignment must inspect some child
        of a node its first offending key inspects; otherwise that key would
        survive unchanged.  So failing assignments are only extended there.
        """
        level = {DepthAssignment.of(())}
        for _ in range(self.mode.max_budget):
            nxt: Set[DepthAssignment] = set()
            for a in sorted(level, key=lambda a: a.sort_key()):
                keys = self.texts_at(goals, a, fk)
                bad = next((k for t, k in keys if self.count(goals, k, t) > tolerance), None)
                if bad is None:
                    return [k for _, k in keys]
                for p, arity in _inspected(bad):
                    for i in range(arity):
                        if p + (i,) not in a.paths:
                            nxt.add(DepthAssignment(a.paths | {p + (i,)}))
            level = nxt
        return None

    def rules_for(self, goals: Sequence[Struct], fk: FunctorKey) -> List[str]:
        return sorted({h for c in goals for h, *_ in self._instances(c, _template(fk))})

    def example_keys(self, goals: Sequence[Struct], fk: FunctorKey, examples: Sequence[Term]) -> List[Term]:
        target = {canonical(e): self.count(goals, e) for e in examples}
        paths: Set[Tuple[int, ...]] = set()
        for e in examples:
            paths |= _paths_of(e)
        cands = _subassignments(paths, self.mode.max_budget)
        full = DepthAssignment(frozenset(paths))
        if full not in cands:
            cands.append(full)
        for a in cands:
            if all(self.count(goals, truncate(e, a)) <= target[canonical(e)] for e in examples):
                out: Dict[str, Term] = {}
                for e in examples:
                    k = truncate(e, a)
                    out.setdefault(canonical(k, dontcare=True), k)
                return [out[t] for t in sorted(out)]
        raise CompileError("no lookahead reproduces the examples' nondeterminism")  # unreachable

    # numbering ------------------------------------------------------------------

    def finish(self, start_hash: str) -> GenTables:
        order: Dict[int, int] = {}

        def visit(sid: int) -> None:
            stack = [sid]
            while stack:
                s = self.resolve_id(stack.pop())
                if s in order:
                    continue
                order[s] = len(order) + 1
                nxt = []
                d = dict((canonical(k, dontcare=True), t) for k, t in self.descend.get(s, ()))
                g = dict((canonical(k, dontcare=True), t) for k, t in self.goto.get(s, ()))
                for text in sorted(d):
                    nxt += [d[text], g[text]]
                stack.extend(reversed(nxt))

        visit(1)
        tables = GenTables(self.g.top, {}, {}, types=dict(sorted(self.types.items())),
                           start_rule=start_hash)
        used: Set[str] = {start_hash}
        for old, new in order.items():
            st = self.states[old]
            items = sorted(st.items, key=lambda x: (x[0], canonical(x[1])))
            tables.states[new] = GenState(new, st.pos, items, dict(sorted(st.examples.items())))
            if old in self.reduce:
                tables.reduce[new] = list(self.reduce[old])
                used.update(self.reduce[old])
            for src, dst in ((self.descend, tables.descend), (self.goto, tables.goto)):
                if old in src:
                    entries = [(k, order[self.resolve_id(t)]) for k, t in src[old]]
                    dst[new] = sorted(entries, key=lambda e: canonical(e[0], dontcare=True))
        for (h, atom), mh in self.alias.items():
            if h in used:
                tables.alias[(h, atom)] = mh
                used.add(mh)
        tables.rules = {h: self.rules[h] for h in sorted(used)}
        tables.alias = dict(sorted(tables.alias.items()))
        return tables


def compile_tables(g: NormalGrammar, mode: Optional[Mode] = None,
                   inverter: Optional[Inverter] = None) -> GenTables:
    """Compile generation tables for ``g`` (default: functor-only keys)."""
    return _Compiler(g, mode or Mode.fixed(1), inverter).run()


# -- serialization ---------------------------------------------------------------

def dump_tables(t: GenTables) -> str:
    lines = [f"top {t.top}", f"start {t.start_rule}"]
    for h, r in t.rules.items():
        lines.append(f"rule {h} {','.join(map(str, r.chain)) or '-'} {canonical(r.as_term())}")
    for a, rep in t.types.items():
        lines.append(f"type {a} {rep}")
    for (h, a), mh in t.alias.items():
        lines.append(f"alias {h} {a} {mh}")
    for sid, st in t.states.items():
        lines.append(f"state {sid:05d} {st.pos}")
        for h, term in st.items:
            lines.append(f"item {sid:05d} {h} {canonical(term, dontcare=True)}")
    for name, table in (("descend", t.descend), ("goto", t.goto)):
        for sid, entries in table.items():
            for k, target in entries:
                lines.append(f"{name} {sid:05d} {canonical(k, dontcare=True)} {target:05d}")
    for sid, hs in t.reduce.items():
        for h in hs:
            lines.append(f"reduce {sid:05d} {h}")
    return "\n".join(sorted(lines)) + "\n"


def parse_tables(text: str) -> GenTables:
    t = GenTables("", {}, {})
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        kind, _, rest = line.partition(" ")
        try:
            if kind == "top":
                t.top = rest
            elif kind == "start":
                t.start_rule = rest
            elif kind == "rule":
                h, chain, body = rest.split(" ", 2)
                term = parse_term(body)
                lhs, rhs = _rule_parts(term)
                ch = () if chain == "-" else tuple(int(x) for x in chain.split(","))
                t.rules[h] = InvertedRule(lhs, tuple(rhs), ch)
            elif kind == "type":
                a, rep = rest.split(" ")
                t.types[a] = rep
            elif kind == "alias":
                h, a, mh = rest.split(" ")
                t.alias[(h, a)] = mh
            elif kind == "state":
                sid, pos = rest.split(" ")
                t.states.setdefault(int(sid), GenState(int(sid), 0, [])).pos = int(pos)
            elif kind == "item":
                sid, h, body = rest.split(" ", 2)
                st = t.states.setdefault(int(sid), GenState(int(sid), 0, []))
                st.items.append((h, parse_term(body)))
            elif kind in ("descend", "goto"):
                sid, body = rest.split(" ", 1)
                key, target = body.rsplit(" ", 1)
                table = t.descend if kind == "descend" else t.goto
                table.setdefault(int(sid), []).append((parse_term(key), int(target)))
            elif kind == "reduce":
                sid, h = rest.split(" ")
                t.reduce.setdefault(int(sid), []).append(h)
            else:
                raise ValueError(f"unknown entry {kind!r}")
        except (ValueError, KeyError) as e:
            raise CompileError(f"line {n}: {e}") from None
    t.states = dict(sorted(t.states.items()))
    for table in (t.descend, t.goto):
        for sid in table:
            table[sid].sort(key=lambda e: canonical(e[0], dontcare=True))
    t.descend = dict(sorted(t.descend.items()))
    t.goto = dict(sorted(t.goto.items()))
    t.reduce = {s: sorted(hs) for s, hs in sorted(t.reduce.items())}
    for h, r in t.rules.items():
        if r.hash != h:
            raise CompileError(f"rule {h} does not match its content")
    return t


def save_tables(t: GenTables, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_tables(t))


def load_tables(path: str) -> GenTables:
    with open(path, encoding="utf-8") as f:
        return parse_tables(f.read())


# -- listings ----------------------------------------------------------------------

def format_state(t: GenTables, sid: int) -> str:
    st = t.states[sid]
    lines = [f"State {sid}"]
    for h, term in st.items:
        lhs, rhs = _rule_parts(term)
        names = {v: f"V{i}" for i, v in enumerate(term_vars(_without_words(term)), 1)}
        parts = [format_constituent(c, names, words=False) for c in rhs]
        parts.insert(st.pos, ".")
        lines.append(f"  {format_constituent(lhs, names, words=False)} => {' '.join(parts)}")
    return "\n".join(lines)


def format_entries(t: GenTables) -> str:
    lines = []
    for name, table in (("descend", t.descend), ("goto", t.goto)):
        for sid, entries in table.items():
            for k, target in entries:
                lines.append(f"{name}({sid},{canonical(k, dontcare=True)},{target}).")
    for sid, hs in t.reduce.items():
        for h in hs:
            r = t.rules[h]
            lines.append(f"reduce({sid},{h}).  % chain {','.join(map(str, r.chain)) or '-'}")
    return "\n".join(lines)
