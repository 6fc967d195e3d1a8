"""Grammar inversion: expand chains of argument-filling rules ending in a
functor-introducing rule into rules displayed from the logical form's side.

Each inverted rule's right-hand side follows the argument order of the core
(abstraction-stripped) logical form of its left-hand side, so descending
through a logical form visits the RHS constituents left to right.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .grammar import NormalGrammar, NormalRule, cat_of, constituent, sem_of
from .terms import (
    NIL, Bindings, Struct, Term, Var, abstraction_depth, canonical, core, format_term,
    list_items, make_list, rename_apart, resolve, term_vars, unify, var,
)

__all__ = ["InversionError", "InvertedRule", "Inverter", "invert_for", "invert_grammar",
           "goal_for", "generalize_goal", "functor_keys", "format_constituent", "format_inverted"]

FunctorKey = Tuple[str, int]

# Hard cap on chain length; argument-list growth is bounded separately.
MAX_CHAIN = 64


class InversionError(ValueError):
    pass


@dataclass(frozen=True)
class InvertedRule:
    lhs: Struct
    rhs: Tuple[Struct, ...]
    chain: Tuple[int, ...]

    def as_term(self) -> Struct:
        return Struct("r", (self.lhs, make_list(self.rhs)))

    @property
    def lf(self) -> Term:
        """Core logical form of the left-hand side."""
        return core(sem_of(self.lhs))

    @property
    def arity(self) -> int:
        return len(self.rhs)

    @property
    def cat(self) -> str:
        return cat_of(self.lhs)

    def text(self) -> str:
        return canonical(self.as_term()) + " @ " + ",".join(map(str, self.chain))

    @property
    def hash(self) -> str:
        return hashlib.sha1(self.text().encode("utf-8")).hexdigest()[:12]

    def renamed(self) -> "InvertedRule":
        t = rename_apart(self.as_term())
        return InvertedRule(t.args[0], tuple(list_items(t.args[1])[0]), self.chain)


def goal_for(cat: str) -> Struct:
    """Saturated goal for a category: no pending arguments."""
    return constituent(cat, var("Sem"), var("W0"), var("W"), NIL, NIL)


def generalize_goal(c: Struct) -> Struct:
    """Forget word positions that no pending argument refers to."""
    shared = set(term_vars(Struct("a", c.args[4:])))
    args = list(c.args)
    for i in (2, 3):
        if not shared.intersection(term_vars(args[i])):
            args[i] = var("W")
    return Struct("c", tuple(args))


def functor_keys(g: NormalGrammar) -> List[FunctorKey]:
    """Functor/arity of every logical form a functor-introducing rule introduces."""
    keys = set()
    for r in g.functor_rules:
        c = core(sem_of(r.lhs))
        if isinstance(c, Struct):
            keys.add((c.functor, len(c.args)))
    return sorted(keys)


class Inverter:
    """Inverted-rule factory for one normal-form grammar, with memoing on the
    variant class of (goal, functor)."""

    def __init__(self, g: NormalGrammar):
        self.grammar = g
        self.by_cat: Dict[str, List[Tuple[NormalRule, Struct]]] = {}
        for r in sorted(g.rules, key=lambda r: r.id):
            self.by_cat.setdefault(r.cat, []).append((r, r.as_term()))
        self.max_args = max((abstraction_depth(sem_of(r.lhs)) for r in g.functor_rules), default=0)
        self.functors = functor_keys(g)
        self._memo: Dict[Tuple[str, FunctorKey], Tuple[Term, List[InvertedRule]]] = {}

    def invert_for(self, goal: Union[str, Term], key: FunctorKey) -> List[InvertedRule]:
        """Inverted rules whose LHS is an instance of ``goal`` with a logical
        form of functor/arity ``key``.  The LHS of each result is the goal
        itself (bound), so callers may unify results back into context."""
        if isinstance(goal, str):
            goal = goal_for(goal)
        memo_key = (canonical(goal), key)
        hit = self._memo.get(memo_key)
        if hit is None:
            stored = rename_apart(goal)
            rules = self._compute(stored, key)
            self._memo[memo_key] = hit = (stored, rules)
        stored, rules = hit
        if not rules:
            return []
        bundle = rename_apart(Struct("b", (stored, make_list(r.as_term() for r in rules))))
        b = unify(bundle.args[0], goal)
        out = []
        for rt, r in zip(list_items(bundle.args[1])[0], rules):
            rt = resolve(rt, b)
            out.append(InvertedRule(rt.args[0], tuple(list_items(rt.args[1])[0]), r.chain))
        return out

    def _compute(self, goal: Struct, key: FunctorKey) -> List[InvertedRule]:
        functor, arity = key
        body = core(sem_of(goal))
        b: Bindings = {}
        if isinstance(body, Var):
            b[body] = Struct(functor, tuple(var() for _ in range(arity)))
        elif (body.functor, len(body.args)) != key:
            return []
        out: List[InvertedRule] = []
        self._expand(goal, goal, b, (), out)
        return out

    def _expand(self, top: Struct, goal: Term, b: Bindings, chain: Tuple[int, ...],
                out: List[InvertedRule]) -> None:
        if len(chain) > MAX_CHAIN:
            raise InversionError(f"chain longer than {MAX_CHAIN} rules: {chain[:8]}...")
        for rule, template in self.by_cat.get(cat_of(goal), ()):
            t = rename_apart(template)
            lhs, rhs_list, arglist = t.args
            b2 = unify(goal, lhs, b)
            if b2 is None:
                continue
            rhs = list_items(rhs_list)[0]
            if rule.kind == "argument":
                pending = list_items(resolve(rhs[0].args[4], b2))[0]
                if len(pending) > self.max_args:
                    continue
                self._expand(top, rhs[0], b2, chain + (rule.id,), out)
                continue
            out.append(self._build(top, rhs, arglist if rule.lexical else None, b2, chain + (rule.id,)))

    def _build(self, top: Struct, rhs: Sequence[Term], arglist: Optional[Term],
               b: Bindings, chain: Tuple[int, ...]) -> InvertedRule:
        lhs = resolve(top, b)
        parts = [resolve(c, b) for c in rhs]
        if arglist is not None:
            items, tail = list_items(resolve(arglist, b))
            if tail != NIL:
                raise InversionError(f"open argument list reaches lexical rule {chain[-1]}")
            parts += [Struct("c", c.args + (NIL, NIL)) if len(c.args) == 4 else c for c in items]
        body = core(sem_of(lhs))
        args = list(body.args) if isinstance(body, Struct) else []
        slots: List[Optional[Struct]] = [None] * len(args)
        for c in parts:
            sc = core(sem_of(c))
            pos = next((i for i, a in enumerate(args) if a == sc and slots[i] is None), None)
            if pos is None:
                raise InversionError(
                    f"constituent {format_constituent(c)} does not fill an argument of "
                    f"{canonical(body)} (chain {chain})")
            slots[pos] = c
        if any(s is None for s in slots):
            raise InversionError(f"argument of {canonical(body)} not realized (chain {chain})")
        return InvertedRule(lhs, tuple(slots), chain)  # type: ignore[arg-type]


def invert_for(cats: Iterable[Union[str, Term]], key: FunctorKey, g: NormalGrammar,
               inverter: Optional[Inverter] = None) -> List[InvertedRule]:
    inv = inverter or Inverter(g)
    out: List[InvertedRule] = []
    for goal in cats:
        out.extend(inv.invert_for(goal, key))
    return out


def invert_grammar(g: NormalGrammar, top: Optional[str] = None,
                   inverter: Optional[Inverter] = None) -> List[InvertedRule]:
    """All inverted rules reachable from the top symbol, each invoked in the
    argument context in which the compiler would invoke it."""
    inv = inverter or Inverter(g)
    goals = [goal_for(top or g.top)]
    seen_goals = {canonical(goals[0])}
    seen_rules: Dict[str, InvertedRule] = {}
    while goals:
        goal = goals.pop(0)
        for key in inv.functors:
            for r in inv.invert_for(goal, key):
                text = canonical(r.as_term())
                if text in seen_rules:
                    continue
                seen_rules[text] = r
                for c in r.rhs:
                    g2 = rename_apart(generalize_goal(c))
                    k = canonical(g2)
                    if k not in seen_goals:
                        seen_goals.add(k)
                        goals.append(g2)
    return list(seen_rules.values())


# -- listing -------------------------------------------------------------------

def format_constituent(c: Term, names: Optional[Dict[Var, str]] = None, words: bool = True) -> str:
    """``<Cat, Sem, W0, W, A0, A>`` with ``e`` for empty argument lists."""
    if names is None:
        names = {v: f"V{i}" for i, v in enumerate(term_vars(c), 1)}

    def fmt(t: Term) -> str:
        return format_term(t, names)

    parts = [c.args[0].functor, fmt(c.args[1])]
    if words:
        parts += [fmt(c.args[2]), fmt(c.args[3])]
    if len(c.args) == 6:
        a0, a = c.args[4], c.args[5]
        if a0 == NIL:
            parts.append("e")
        else:
            items, tail = list_items(a0)
            inner = ", ".join(format_constituent(x, names, words) for x in items)
            tail_s = "" if tail == NIL else "|" + fmt(tail)
            parts.append(f"[{inner}{tail_s}]")
        parts.append("e" if a == NIL else fmt(a))
    return "<" + ", ".join(parts) + ">"


def format_inverted(r: InvertedRule, words: bool = True) -> str:
    """Listing line with canonical variable names V1, V2, ... ."""
    names = {v: f"V{i}" for i, v in enumerate(term_vars(r.as_term()), 1)}
    rhs = " ".join(format_constituent(c, names, words) for c in r.rhs) or "e"
    return f"{format_constituent(r.lhs, names, words)} -> {rhs}"
