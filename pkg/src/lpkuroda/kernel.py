"""Locally nameless terms of the lambda-Pi calculus.

Bound variables are de Bruijn indices (``BVar``); free variables are names
(``FVar``).  Binders keep the name they were written with, but that name is
only a printing hint: it is excluded from equality, so ``==`` on terms is
alpha-equivalence.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DuplicateName

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from .frontend import format_term

        return format_term(self)


@dataclass(frozen=True, slots=True)
class Sort(Term):
    kind: bool  # False: TYPE, True: KIND


TYPE = Sort(False)
KIND = Sort(True)


@dataclass(frozen=True, slots=True)
class BVar(Term):
    index: int


@dataclass(frozen=True, slots=True)
class FVar(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Pi(Term):
    domain: Term
    body: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class Lam(Term):
    domain: Term
    body: Term
    name: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


_fresh_counter = itertools.count()


def fresh_name(hint: str = "x") -> str:
    """A name that the parser can never produce (contains ``%``)."""
    base = hint.split("%", 1)[0] or "x"
    return f"{base}%{next(_fresh_counter)}"


# -- construction helpers ---------------------------------------------------


def app(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def unspine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def head_of(t: Term) -> Term:
    while isinstance(t, App):
        t = t.fn
    return t


def pi(name: str, domain: Term, body: Term) -> Pi:
    """Dependent product binding the free variable ``name`` of ``body``."""
    return Pi(domain, close(body, name), name)


def lam(name: str, domain: Term, body: Term) -> Lam:
    return Lam(domain, close(body, name), name)


def arrow(*types: Term) -> Term:
    """Right-nested non-dependent product ``A1 -> ... -> An``."""
    *doms, result = types
    for d in reversed(doms):
        result = Pi(d, shift(result, 1), "_")
    return result


# -- de Bruijn plumbing -----------------------------------------------------


def shift(t: Term, amount: int, cutoff: int = 0) -> Term:
    if amount == 0:
        return t
    match t:
        case BVar(i):
            return BVar(i + amount) if i >= cutoff else t
        case App(f, a):
            return App(shift(f, amount, cutoff), shift(a, amount, cutoff))
        case Pi(d, b, n):
            return Pi(shift(d, amount, cutoff), shift(b, amount, cutoff + 1), n)
        case Lam(d, b, n):
            return Lam(shift(d, amount, cutoff), shift(b, amount, cutoff + 1), n)
    return t


def has_loose_bvars(t: Term, depth: int = 0) -> bool:
    match t:
        case BVar(i):
            return i >= depth
        case App(f, a):
            return has_loose_bvars(f, depth) or has_loose_bvars(a, depth)
        case Pi(d, b) | Lam(d, b):
            return has_loose_bvars(d, depth) or has_loose_bvars(b, depth + 1)
    return False


def references_bvar(t: Term, index: int) -> bool:
    """Whether ``BVar(index)`` (relative to the top of ``t``) occurs."""
    match t:
        case BVar(i):
            return i == index
        case App(f, a):
            return references_bvar(f, index) or references_bvar(a, index)
        case Pi(d, b) | Lam(d, b):
            return references_bvar(d, index) or references_bvar(b, index + 1)
    return False


def instantiate(body: Term, value: Term) -> Term:
    """``body[0 := value]`` where ``body`` sits directly under a binder."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case BVar(i):
                if i == depth:
                    return shift(value, depth)
                if i > depth:
                    return BVar(i - 1)
                return t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Pi(d, b, n):
                return Pi(go(d, depth), go(b, depth + 1), n)
            case Lam(d, b, n):
                return Lam(go(d, depth), go(b, depth + 1), n)
        return t

    return go(body, 0)


def open_binder(body: Term, name: str) -> Term:
    return instantiate(body, FVar(name))


def close(t: Term, name: str) -> Term:
    """Turn free occurrences of ``name`` into the variable bound just above."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case FVar(n) if n == name:
                return BVar(depth)
            case BVar(i):
                return BVar(i + 1) if i >= depth else t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Pi(d, b, n):
                return Pi(go(d, depth), go(b, depth + 1), n)
            case Lam(d, b, n):
                return Lam(go(d, depth), go(b, depth + 1), n)
        return t

    return go(t, 0)


# -- the three public operations ----------------------------------------------


def alpha_eq(a: Term, b: Term) -> bool:
    return a == b


def free_vars(t: Term) -> frozenset[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        match t:
            case FVar(n):
                out.add(n)
            case App(f, a):
                stack.append(f)
                stack.append(a)
            case Pi(d, b) | Lam(d, b):
                stack.append(d)
                stack.append(b)
    return frozenset(out)


def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t[x <- u]`` for a free variable ``x``."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case FVar(n) if n == x:
                return shift(u, depth)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Pi(d, b, n):
                return Pi(go(d, depth), go(b, depth + 1), n)
            case Lam(d, b, n):
                return Lam(go(d, depth), go(b, depth + 1), n)
        return t

    return go(t, 0)


def substitute_many(t: Term, mapping: dict[str, Term]) -> Term:
    if not mapping:
        return t

    def go(t: Term, depth: int) -> Term:
        match t:
            case FVar(n) if n in mapping:
                return shift(mapping[n], depth)
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Pi(d, b, n):
                return Pi(go(d, depth), go(b, depth + 1), n)
            case Lam(d, b, n):
                return Lam(go(d, depth), go(b, depth + 1), n)
        return t

    return go(t, 0)


def replace_consts(t: Term, mapping: dict[str, Term]) -> Term:
    """Replace constants by closed terms."""

    def go(t: Term) -> Term:
        match t:
            case Const(n) if n in mapping:
                return mapping[n]
            case App(f, a):
                return App(go(f), go(a))
            case Pi(d, b, n):
                return Pi(go(d), go(b), n)
            case Lam(d, b, n):
                return Lam(go(d), go(b), n)
        return t

    return go(t)


def constants(t: Term) -> frozenset[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        match t:
            case Const(n):
                out.add(n)
            case App(f, a):
                stack.append(f)
                stack.append(a)
            case Pi(d, b) | Lam(d, b):
                stack.append(d)
                stack.append(b)
    return frozenset(out)


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        t = stack.pop()
        yield t
        match t:
            case App(f, a):
                stack.append(a)
                stack.append(f)
            case Pi(d, b) | Lam(d, b):
                stack.append(b)
                stack.append(d)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


# -- contexts and signatures --------------------------------------------------


class Context:
    """Ordered typing context ``x1 : A1, ..., xn : An`` with distinct names."""

    __slots__ = ("entries", "_index")

    def __init__(self, entries: Iterable[tuple[str, Term]] = ()):
        self.entries: tuple[tuple[str, Term], ...] = tuple(entries)
        self._index = {}
        for name, ty in self.entries:
            if name in self._index:
                raise DuplicateName(f"variable {name} declared twice in context")
            self._index[name] = ty

    def extend(self, name: str, ty: Term) -> "Context":
        if name in self._index:
            raise DuplicateName(f"variable {name} declared twice in context")
        new = Context.__new__(Context)
        new.entries = self.entries + ((name, ty),)
        new._index = dict(self._index)
        new._index[name] = ty
        return new

    def lookup(self, name: str) -> Term | None:
        return self._index.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    def __eq__(self, other) -> bool:
        return isinstance(other, Context) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n} : {t}" for n, t in self.entries)
        return f"Context({inner})"


EMPTY_CONTEXT = Context()


@dataclass(frozen=True)
class ConstEntry:
    name: str
    type: Term
    definable: bool = False
