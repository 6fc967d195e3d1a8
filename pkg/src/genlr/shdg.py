"""Semantic-head-driven generation over the plain attributed grammar.

A non-chain rule whose logical form matches the goal is chosen as pivot, its
right-hand side is generated recursively, and the pivot is then connected
upwards to the goal category through chain rules, generating each chain
rule's non-head constituents on the way.  Every candidate rule is tried in
turn, which is what the search statistics measure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .grammar import Grammar, GrammarRule, cat_of, classify, constituent, sem_of
from .terms import (
    NIL, Bindings, Struct, Term, Var, abstraction_depth, core, functor_key,
    list_items, rename_apart, resolve, unify, var,
)

__all__ = ["GenStats", "GenerationError", "SHDG", "shdg_generate"]


@dataclass
class GenStats:
    rule_applications: int = 0
    choice_points: int = 0
    backtracks: int = 0

    def __str__(self) -> str:
        return (f"applications={self.rule_applications} "
                f"choicepoints={self.choice_points} backtracks={self.backtracks}")


class GenerationError(RuntimeError):
    pass


class SHDG:
    def __init__(self, g: Grammar, chain_bound: Optional[int] = None):
        self.grammar = g
        chain, non_chain = classify(g)
        self.chain = sorted(chain, key=lambda r: r.id)
        bad = [r.id for r in self.chain if r.head is None]
        if bad:
            raise GenerationError(f"chain rules without a unique semantic head: {bad}")
        self.pivots: Dict[Optional[Tuple[str, int]], List[GrammarRule]] = {}
        for r in sorted(non_chain, key=lambda r: r.id):
            self.pivots.setdefault(functor_key(core(sem_of(r.lhs))), []).append(r)
        if chain_bound is None:
            pairs = {(cat_of(c), abstraction_depth(sem_of(c)))
                     for r in g.rules for c in (r.lhs,) + r.rhs}
            chain_bound = len(pairs) + 1
        self.chain_bound = chain_bound

    def _candidates(self, lf: Term) -> List[GrammarRule]:
        key = functor_key(lf)
        if key is None:
            return sorted((r for rs in self.pivots.values() for r in rs), key=lambda r: r.id)
        return sorted(self.pivots.get(key, []) + self.pivots.get(None, []), key=lambda r: r.id)

    def _attempt(self, stats: GenStats, it: Iterator[Bindings]) -> Iterator[Bindings]:
        stats.choice_points += 1
        found = False
        for b in it:
            found = True
            yield b
        if not found:
            stats.backtracks += 1

    def gen(self, goal: Term, b: Bindings, stats: GenStats) -> Iterator[Bindings]:
        """Bindings under which ``goal`` (a quadruple constituent) is derivable."""
        lf = core(sem_of(goal), b)
        for rule in self._candidates(lf):
            yield from self._attempt(stats, self._pivot(rule, goal, lf, b, stats))

    def _pivot(self, rule: GrammarRule, goal: Term, lf: Term, b: Bindings,
               stats: GenStats) -> Iterator[Bindings]:
        t = rename_apart(Struct("r", (rule.lhs,) + rule.rhs))
        lhs, rhs = t.args[0], t.args[1:]
        b1 = unify(core(sem_of(lhs)), lf, b)
        if b1 is None:
            return
        stats.rule_applications += 1
        for b2 in self._all(rhs, b1, stats):
            yield from self.connect(lhs, goal, b2, stats, ())

    def _all(self, cs: Tuple[Term, ...], b: Bindings, stats: GenStats) -> Iterator[Bindings]:
        if not cs:
            yield b
            return
        for b1 in self.gen(cs[0], b, stats):
            yield from self._all(cs[1:], b1, stats)

    def connect(self, node: Term, goal: Term, b: Bindings, stats: GenStats,
                chain: Tuple[int, ...]) -> Iterator[Bindings]:
        """Link ``node`` to ``goal`` through zero or more chain rules."""
        if len(chain) > self.chain_bound:
            raise GenerationError(
                f"chain exceeds bound {self.chain_bound}; suspect cycle through rules {list(chain)}")
        if cat_of(node) == cat_of(goal):
            b1 = unify(node, goal, b)
            stats.choice_points += 1
            if b1 is None:
                stats.backtracks += 1
            else:
                yield b1
        for rule in self.chain:
            if cat_of(rule.rhs[rule.head]) != cat_of(node):
                continue
            yield from self._attempt(stats, self._chain_step(rule, node, goal, b, stats, chain))

    def _chain_step(self, rule: GrammarRule, node: Term, goal: Term, b: Bindings,
                    stats: GenStats, chain: Tuple[int, ...]) -> Iterator[Bindings]:
        t = rename_apart(Struct("r", (rule.lhs,) + rule.rhs))
        lhs, rhs = t.args[0], t.args[1:]
        b1 = unify(rhs[rule.head], node, b)
        if b1 is None:
            return
        stats.rule_applications += 1
        others = tuple(c for i, c in enumerate(rhs) if i != rule.head)
        for b2 in self._all(others, b1, stats):
            yield from self.connect(lhs, goal, b2, stats, chain + (rule.id,))

    def generate(self, cat: str, lf: Term, first: bool = False) -> Tuple[List[str], GenStats]:
        stats = GenStats()
        w0 = var("W0")
        goal = constituent(cat, lf, w0, NIL)
        out: List[str] = []
        for b in self.gen(goal, {}, stats):
            items, tail = list_items(resolve(w0, b))
            if tail != NIL or any(isinstance(w, Var) for w in items):
                continue
            s = " ".join(w.functor for w in items)
            if s not in out:
                out.append(s)
                if first:
                    break
        return out, stats


def shdg_generate(g: Grammar, cat: str, lf: Term, first: bool = False,
                  chain_bound: Optional[int] = None) -> Tuple[List[str], GenStats]:
    """Strings for (cat, lf) in discovery order, plus search statistics."""
    return SHDG(g, chain_bound).generate(cat, lf, first)
