"""Rewrite rules, theories, and reduction modulo beta and user rules.

Matching is first-order: pattern variables are the free variables of the
rule's left-hand side, and they may only stand for arguments (never for the
head of an application).  Non-linear patterns are accepted; the repeated
occurrences must be convertible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import BudgetExceeded
from .kernel import (
    App,
    Const,
    ConstEntry,
    FVar,
    Lam,
    Pi,
    Term,
    app,
    close,
    free_vars,
    fresh_name,
    has_loose_bvars,
    instantiate,
    open_binder,
    substitute_many,
    unspine,
)

DEFAULT_BUDGET = 100_000


class Base(enum.Enum):
    CLASSICAL = "classical"
    INTUITIONISTIC = "intuitionistic"
    BARE = "bare"


@dataclass(frozen=True)
class RewriteRule:
    context: tuple[tuple[str, Term], ...]
    lhs: Term
    rhs: Term
    name: str | None = field(default=None, compare=False)

    @property
    def head(self) -> str | None:
        h, _ = unspine(self.lhs)
        return h.name if isinstance(h, Const) else None

    @property
    def arity(self) -> int:
        return len(unspine(self.lhs)[1])

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.context)

    def __str__(self) -> str:
        vs = ", ".join(self.variables)
        return f"[{vs}] {self.lhs} --> {self.rhs}"


class Theory:
    """A signature plus a rewrite system.  Extending returns a new theory."""

    def __init__(
        self,
        signature: Mapping[str, ConstEntry] | None = None,
        rules: tuple[RewriteRule, ...] = (),
        base: Base = Base.BARE,
    ):
        self._signature = dict(signature or {})
        self.rules = tuple(rules)
        self.base = base
        self._by_head: dict[str, list[RewriteRule]] = {}
        for r in self.rules:
            self._by_head.setdefault(r.head, []).append(r)

    @property
    def signature(self) -> Mapping[str, ConstEntry]:
        return MappingProxyType(self._signature)

    def lookup(self, name: str) -> ConstEntry | None:
        return self._signature.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._signature

    def rules_for(self, head: str) -> list[RewriteRule]:
        return self._by_head.get(head, [])

    def add_const(self, name: str, ty: Term, definable: bool = False) -> "Theory":
        sig = dict(self._signature)
        sig[name] = ConstEntry(name, ty, definable)
        return Theory(sig, self.rules, self.base)

    def add_rule(self, rule: RewriteRule) -> "Theory":
        return Theory(self._signature, self.rules + (rule,), self.base)

    def with_base(self, base: Base) -> "Theory":
        return Theory(self._signature, self.rules, base)

    def without(self, names) -> "Theory":
        names = set(names)
        sig = {n: e for n, e in self._signature.items() if n not in names}
        return Theory(sig, self.rules, self.base)

    def __repr__(self) -> str:
        return (
            f"Theory(base={self.base.value}, constants={len(self._signature)}, "
            f"rules={len(self.rules)})"
        )


# -- matching -----------------------------------------------------------------


def match(
    lhs: Term,
    candidate: Term,
    variables=None,
    theory: Theory | None = None,
    reducer: "Reducer | None" = None,
) -> dict[str, Term] | None:
    """First-order matching of ``lhs`` against ``candidate``.

    ``variables`` defaults to the free variables of ``lhs``.  Without a theory
    the match is purely syntactic (repeated variables must be alpha-equal);
    with one, inspected subterms of ``candidate`` are put in weak head normal
    form on demand and repeated variables are compared with ``conv``.
    """
    pvars = frozenset(free_vars(lhs) if variables is None else variables)
    if reducer is None and theory is not None:
        reducer = Reducer(theory)
    subst: dict[str, Term] = {}
    if _match(lhs, candidate, pvars, subst, reducer, 0):
        return subst
    return None


def _match(pat, t, pvars, subst, reducer, depth) -> bool:
    if isinstance(pat, FVar) and pat.name in pvars:
        if depth > 0 and has_loose_bvars(t):
            return False
        if pat.name in subst:
            prev = subst[pat.name]
            if prev == t:
                return True
            return reducer is not None and reducer.conv(prev, t)
        subst[pat.name] = t
        return True
    if _match_shape(pat, t, pvars, subst, reducer, depth):
        return True
    if reducer is None:
        return False
    t2 = reducer.whnf(t)
    if t2 == t:
        return False
    return _match_shape(pat, t2, pvars, subst, reducer, depth)


def _match_shape(pat, t, pvars, subst, reducer, depth) -> bool:
    saved = dict(subst)
    ok = _match_shape_inner(pat, t, pvars, subst, reducer, depth)
    if not ok:
        subst.clear()
        subst.update(saved)
    return ok


def _match_shape_inner(pat, t, pvars, subst, reducer, depth) -> bool:
    match pat:
        case App():
            ph, pargs = unspine(pat)
            th, targs = unspine(t)
            if len(pargs) != len(targs):
                return False
            if not _match_rigid(ph, th):
                return False
            return all(
                _match(p, a, pvars, subst, reducer, depth)
                for p, a in zip(pargs, targs)
            )
        case Pi(pd, pb) | Lam(pd, pb):
            if type(t) is not type(pat):
                return False
            return _match(pd, t.domain, pvars, subst, reducer, depth) and _match(
                pb, t.body, pvars, subst, reducer, depth + 1
            )
    return _match_rigid(pat, t)


def _match_rigid(p: Term, t: Term) -> bool:
    # heads of patterns are constants, sorts, bound or non-pattern variables
    return p == t


# -- reduction ----------------------------------------------------------------


class Reducer:
    """Reduction engine for one theory with a shared step budget."""

    def __init__(self, theory: Theory, budget: int | None = None):
        self.theory = theory
        self.budget = DEFAULT_BUDGET if budget is None else budget
        self.steps = 0

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(
                f"reduction exceeded {self.budget} steps; the rewrite system "
                "is probably not terminating"
            )

    def head_step(self, t: Term) -> Term | None:
        """One beta or rule step at the head, or None."""
        h, args = unspine(t)
        if isinstance(h, Lam) and args:
            return app(instantiate(h.body, args[0]), *args[1:])
        if isinstance(h, Const):
            for rule in self.theory.rules_for(h.name):
                k = rule.arity
                if k > len(args):
                    continue
                sub = {}
                # the candidate itself is what we are reducing: only its
                # arguments are normalized on demand
                if _match_shape(
                    rule.lhs,
                    app(h, *args[:k]),
                    frozenset(rule.variables),
                    sub,
                    self,
                    0,
                ):
                    return app(substitute_many(rule.rhs, sub), *args[k:])
        return None

    def whnf(self, t: Term) -> Term:
        while True:
            nxt = self.head_step(t)
            if nxt is None:
                return t
            self._tick()
            t = nxt

    def normalize(self, t: Term) -> Term:
        t = self.whnf(t)
        match t:
            case Pi(d, b, n) | Lam(d, b, n):
                x = fresh_name(n)
                body = close(self.normalize(open_binder(b, x)), x)
                return type(t)(self.normalize(d), body, n)
            case App():
                h, args = unspine(t)
                return app(self.normalize(h) if isinstance(h, (Pi, Lam)) else h,
                           *[self.normalize(a) for a in args])
        return t

    def conv(self, a: Term, b: Term) -> bool:
        if a == b:
            return True
        a = self.whnf(a)
        b = self.whnf(b)
        if a == b:
            return True
        match a, b:
            case (Pi(d1, b1, n), Pi(d2, b2)) | (Lam(d1, b1, n), Lam(d2, b2)):
                if type(a) is not type(b) or not self.conv(d1, d2):
                    return False
                x = FVar(fresh_name(n))
                return self.conv(instantiate(b1, x), instantiate(b2, x))
            case App(), App():
                h1, args1 = unspine(a)
                h2, args2 = unspine(b)
                if len(args1) != len(args2) or not self.conv(h1, h2):
                    return False
                return all(self.conv(x, y) for x, y in zip(args1, args2))
        return False


def whnf(th: Theory, t: Term, budget: int | None = None) -> Term:
    return Reducer(th, budget).whnf(t)


def normalize(th: Theory, t: Term, budget: int | None = None) -> Term:
    return Reducer(th, budget).normalize(t)


def conv(th: Theory, a: Term, b: Term, budget: int | None = None) -> bool:
    return Reducer(th, budget).conv(a, b)


def beta_normalize(t: Term) -> Term:
    """Full beta normal form, ignoring rewrite rules."""
    return Reducer(Theory()).normalize(t)


# -- single steps, used to generate convertible pairs -------------------------


def one_step_reducts(th: Theory, t: Term) -> Iterator[Term]:
    """All terms reachable from ``t`` by one beta or rule step at any position.

    Rules are matched syntactically here (no normalization of arguments).
    """
    if isinstance(t, App) and isinstance(t.fn, Lam):
        yield instantiate(t.fn.body, t.arg)
    h, args = unspine(t)
    if isinstance(h, Const):
        for rule in th.rules_for(h.name):
            k = rule.arity
            if k > len(args):
                continue
            if k < len(args):
                continue  # the redex is a prefix, reached through App below
            sub = {}
            if _match(rule.lhs, t, frozenset(rule.variables), sub, None, 0):
                yield substitute_many(rule.rhs, sub)
    match t:
        case App(f, a):
            for f2 in one_step_reducts(th, f):
                yield App(f2, a)
            for a2 in one_step_reducts(th, a):
                yield App(f, a2)
        case Pi(d, b, n) | Lam(d, b, n):
            for d2 in one_step_reducts(th, d):
                yield type(t)(d2, b, n)
            for b2 in one_step_reducts(th, b):
                yield type(t)(d, b2, n)


def rule_overlaps(th: Theory) -> list[tuple[str, int]]:
    """Heads carrying more than one rule (informational; confluence unchecked)."""
    out = []
    for head, rules in th._by_head.items():
        if len(rules) > 1:
            out.append((head, len(rules)))
    return sorted(out)

