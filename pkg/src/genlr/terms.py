"""First-order terms: representation, unification, subsumption, renaming and truncation.

Logical forms, constituents and table keys are all plain terms.  The
abstraction operator ``^`` is an ordinary right-associative binary functor, so
``X^Y^see(X,Y)`` is ``^(X, ^(Y, see(X,Y)))``.  Lists use ``'.'/2`` and ``[]``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

__all__ = [
    "Var", "Struct", "Term", "Bindings", "TermSyntaxError", "DepthAssignment",
    "atom", "var", "make_list", "list_items", "NIL",
    "walk", "resolve", "unify", "subsumes", "variant", "rename_apart",
    "truncate", "core", "abstraction_depth", "with_core", "term_vars", "is_ground",
    "format_term", "canonical", "parse_term", "parse_terms", "functor_key", "size",
]

_ids = itertools.count(1)


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    id: int

    def __repr__(self) -> str:
        return f"{self.name}_{self.id}"


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: Tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        return format_term(self)


Term = Union[Var, Struct]
Bindings = Dict[Var, Term]

NIL = Struct("[]")


class TermSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line, self.column = line, col


def var(name: str = "_") -> Var:
    return Var(name, next(_ids))


def atom(name: str) -> Struct:
    return Struct(name)


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = Struct(".", (item, out))
    return out


def list_items(t: Term, b: Optional[Bindings] = None) -> Tuple[List[Term], Term]:
    """Split a (possibly partial) list into its elements and its tail."""
    items = []
    t = walk(t, b) if b else t
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        items.append(t.args[0])
        t = walk(t.args[1], b) if b else t.args[1]
    return items, t


def functor_key(t: Term) -> Optional[Tuple[str, int]]:
    return (t.functor, len(t.args)) if isinstance(t, Struct) else None


# -- substitution --------------------------------------------------------------

def walk(t: Term, b: Optional[Bindings]) -> Term:
    while isinstance(t, Var) and b and t in b:
        t = b[t]
    return t


def resolve(t: Term, b: Optional[Bindings]) -> Term:
    """Apply bindings all the way down."""
    if not b:
        return t
    t = walk(t, b)
    if isinstance(t, Var) or not t.args:
        return t
    return Struct(t.functor, tuple(resolve(a, b) for a in t.args))


def _occurs(v: Var, t: Term, b: Bindings) -> bool:
    stack = [t]
    while stack:
        t = walk(stack.pop(), b)
        if t == v:
            return True
        if isinstance(t, Struct):
            stack.extend(t.args)
    return False


def unify(t1: Term, t2: Term, b: Optional[Bindings] = None,
          occurs_check: bool = True) -> Optional[Bindings]:
    """Most general unifier extending ``b``, or None.  ``b`` is not modified."""
    out: Bindings = dict(b) if b else {}
    stack = [(t1, t2)]
    while stack:
        a, c = stack.pop()
        a, c = walk(a, out), walk(c, out)
        if a == c:
            continue
        if isinstance(a, Var):
            if occurs_check and _occurs(a, c, out):
                return None
            out[a] = c
        elif isinstance(c, Var):
            if occurs_check and _occurs(c, a, out):
                return None
            out[c] = a
        elif a.functor != c.functor or len(a.args) != len(c.args):
            return None
        else:
            stack.extend(zip(a.args, c.args))
    return out


def match(general: Term, specific: Term, b: Optional[Bindings] = None) -> Optional[Bindings]:
    """One-way matching: bind only variables of ``general``."""
    out: Bindings = dict(b) if b else {}
    stack = [(general, specific)]
    while stack:
        g, s = stack.pop()
        if isinstance(g, Var):
            if g in out:
                if out[g] != s:
                    return None
            else:
                out[g] = s
        elif isinstance(s, Var) or g.functor != s.functor or len(g.args) != len(s.args):
            return None
        else:
            stack.extend(zip(g.args, s.args))
    return out


def subsumes(general: Term, specific: Term) -> bool:
    """True iff some substitution maps ``general`` onto ``specific``.

    Variables of ``specific`` are treated as constants; the two terms are
    assumed renamed apart.
    """
    return match(general, specific) is not None


def variant(a: Term, c: Term) -> bool:
    return subsumes(a, c) and subsumes(c, a)


def term_vars(t: Term) -> List[Var]:
    seen: Dict[Var, None] = {}
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            seen.setdefault(t)
        else:
            stack.extend(reversed(t.args))
    return list(seen)


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def rename_apart(t: Term, mapping: Optional[Dict[Var, Var]] = None) -> Term:
    """Copy of ``t`` with fresh variables; sharing is preserved via ``mapping``."""
    if mapping is None:
        mapping = {}

    def copy(t: Term) -> Term:
        if isinstance(t, Var):
            v = mapping.get(t)
            if v is None:
                v = mapping[t] = Var(t.name, next(_ids))
            return v
        if not t.args:
            return t
        return Struct(t.functor, tuple(copy(a) for a in t.args))

    return copy(t)


def size(t: Term) -> int:
    """Number of functor nodes."""
    if isinstance(t, Var):
        return 0
    return 1 + sum(size(a) for a in t.args)


# -- abstractions --------------------------------------------------------------

def core(t: Term, b: Optional[Bindings] = None) -> Term:
    """Strip ``X^`` abstraction prefixes."""
    t = walk(t, b)
    while isinstance(t, Struct) and t.functor == "^" and len(t.args) == 2:
        t = walk(t.args[1], b)
    return t


def abstraction_depth(t: Term) -> int:
    n = 0
    while isinstance(t, Struct) and t.functor == "^" and len(t.args) == 2:
        n, t = n + 1, t.args[1]
    return n


def with_core(t: Term, new_core: Term) -> Term:
    """Replace the body under the abstraction prefixes of ``t``."""
    if isinstance(t, Struct) and t.functor == "^" and len(t.args) == 2:
        return Struct("^", (t.args[0], with_core(t.args[1], new_core)))
    return new_core


# -- truncation ----------------------------------------------------------------

Path = Tuple[int, ...]


@dataclass(frozen=True)
class DepthAssignment:
    """Prefix-closed set of argument paths whose functors are inspected.

    ``()`` is the root; ``(1, 0)`` the first argument of the second argument.
    The total budget is the number of inspected nodes.
    """
    paths: frozenset = frozenset()

    @property
    def total(self) -> int:
        return len(self.paths)

    @classmethod
    def uniform(cls, depth: int, max_arity: int = 8) -> "DepthAssignment":
        paths = {()}
        frontier = [()]
        if depth <= 0:
            return cls(frozenset())
        for _ in range(depth - 1):
            frontier = [p + (i,) for p in frontier for i in range(max_arity)]
            paths.update(frontier)
        return cls(frozenset(paths))

    @classmethod
    def of(cls, *paths: Path) -> "DepthAssignment":
        return cls(frozenset(paths))

    def child(self, i: int) -> "DepthAssignment":
        return DepthAssignment(frozenset(p[1:] for p in self.paths if p and p[0] == i))

    def __bool__(self) -> bool:
        return () in self.paths

    def sort_key(self):
        """Smaller budgets first; among equals, leftmost-deepest first."""
        return (self.total, tuple(sorted(self.paths)))


def truncate(t: Term, assignment: Union[DepthAssignment, int]) -> Term:
    """Replace uninspected subterms with fresh don't-care variables.

    An integer assignment is a uniform depth (number of functor levels kept).
    """
    if isinstance(assignment, int):
        return _truncate_depth(t, assignment)
    if isinstance(t, Var) or () not in assignment.paths:
        return var("_")
    return Struct(t.functor, tuple(truncate(a, assignment.child(i)) for i, a in enumerate(t.args)))


def _truncate_depth(t: Term, depth: int) -> Term:
    if isinstance(t, Var) or depth <= 0:
        return var("_")
    return Struct(t.functor, tuple(_truncate_depth(a, depth - 1) for a in t.args))


# -- printing ------------------------------------------------------------------

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _quote(name: str) -> str:
    if _PLAIN_ATOM.match(name) or name == "[]":
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_term(t: Term, names: Optional[Dict[Var, str]] = None,
                anonymous: Iterable[Var] = ()) -> str:
    """Prolog-style text.  Variables in ``anonymous`` print as ``_``."""
    anon = set(anonymous)

    def fmt(t: Term, in_lhs_of_caret: bool = False) -> str:
        if isinstance(t, Var):
            if t in anon:
                return "_"
            if names is not None and t in names:
                return names[t]
            return f"_G{t.id}" if t.name == "_" else f"{t.name}_{t.id}"
        if t.functor == "." and len(t.args) == 2:
            items, tail = list_items(t)
            body = ",".join(fmt(i) for i in items)
            if tail == NIL:
                return f"[{body}]"
            return f"[{body}|{fmt(tail)}]"
        if t.functor == "^" and len(t.args) == 2:
            s = f"{fmt(t.args[0], True)}^{fmt(t.args[1])}"
            return f"({s})" if in_lhs_of_caret else s
        if not t.args:
            return _quote(t.functor)
        return f"{_quote(t.functor)}({','.join(fmt(a) for a in t.args)})"

    return fmt(t)


def canonical(t: Term, dontcare: bool = False, prefix: str = "V") -> str:
    """Variable-order-canonical text: variables become V1, V2, ... in order of
    first occurrence; with ``dontcare`` singleton variables print as ``_``."""
    order = term_vars(t)
    anon: List[Var] = []
    if dontcare:
        counts: Dict[Var, int] = {}
        stack = [t]
        while stack:
            x = stack.pop()
            if isinstance(x, Var):
                counts[x] = counts.get(x, 0) + 1
            else:
                stack.extend(x.args)
        anon = [v for v, n in counts.items() if n == 1]
        order = [v for v in order if v not in anon]
    names = {v: f"{prefix}{i}" for i, v in enumerate(order, 1)}
    return format_term(t, names, anon)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<quoted>'(?:[^'\\]|\\.|'')*')
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<punct>-->|==>|\[\]|[()\[\]|,^{}:.@=])
""", re.VERBOSE)


def tokenize(text: str, start: int = 0, end: Optional[int] = None) -> List[Tuple[str, str, int]]:
    end = len(text) if end is None else end
    out = []
    pos = start
    while pos < end:
        m = _TOKEN.match(text, pos, end)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), m.start()))
        pos = m.end()
    return out


def _unquote(tok: str) -> str:
    body = tok[1:-1]
    if tok[0] == "'":
        body = body.replace("''", "'")
    return re.sub(r"\\(.)", r"\1", body)


class TermParser:
    """Recursive-descent parser over a token list.  Variable names are scoped
    to one parser instance (``_`` is always fresh)."""

    def __init__(self, text: str, tokens: Optional[list] = None):
        self.text = text
        self.toks = tokenize(text) if tokens is None else tokens
        self.i = 0
        self.scope: Dict[str, Var] = {}

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eof", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return TermSyntaxError(msg, self.text, tok[2])

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def at(self, value: str) -> bool:
        return self.peek()[1] == value and self.peek()[0] == "punct"

    def fresh_scope(self):
        self.scope = {}

    def variable(self, name: str) -> Var:
        if name == "_":
            return var("_")
        v = self.scope.get(name)
        if v is None:
            v = self.scope[name] = var(name)
        return v

    def term(self) -> Term:
        left = self.primary()
        if self.at("^"):
            self.next()
            return Struct("^", (left, self.term()))
        return left

    def primary(self) -> Term:
        kind, value, pos = self.next()
        if kind == "var":
            return self.variable(value)
        if kind in ("atom", "quoted"):
            name = _unquote(value) if kind == "quoted" else value
            if self.at("("):
                return Struct(name, tuple(self.arguments()))
            return Struct(name)
        if kind == "punct" and value == "[]":
            return NIL
        if kind == "punct" and value == "[":
            if self.at("]"):
                self.next()
                return NIL
            items = [self.term()]
            while self.at(","):
                self.next()
                items.append(self.term())
            tail: Term = NIL
            if self.at("|"):
                self.next()
                tail = self.term()
            self.expect("]")
            return make_list(items, tail)
        if kind == "punct" and value == "(":
            t = self.term()
            self.expect(")")
            return t
        raise self.error(f"unexpected {value or 'end of input'!r}", (kind, value, pos))

    def arguments(self) -> List[Term]:
        self.expect("(")
        args = [self.term()]
        while self.at(","):
            self.next()
            args.append(self.term())
        self.expect(")")
        return args


def parse_term(text: str) -> Term:
    """Parse one term, e.g. ``parse_term("mod(sleep(john), ynq)")``."""
    p = TermParser(text)
    if not p.toks:
        raise TermSyntaxError("empty term", text, 0)
    t = p.term()
    if p.i != len(p.toks):
        raise p.error(f"unexpected {p.peek()[1]!r} after term")
    return t


def parse_terms(text: str) -> List[Term]:
    """One term per non-blank, non-comment line."""
    out = []
    for line in text.splitlines():
        s = line.split("%", 1)[0].strip()
        if s:
            out.append(parse_term(s.rstrip(".")))
    return out
