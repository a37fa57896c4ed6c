"""Type inference and checking for the lambda-Pi calculus modulo rewriting.

Inference is syntax directed.  Conversion is used at application arguments
and at explicit ``check`` boundaries; function types are put in weak head
normal form before a product is expected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BudgetExceeded,
    DuplicateName,
    HeadNotDefinable,
    KernelError,
    KindAsDomain,
    NotAProduct,
    NotClosed,
    ProofLevelRule,
    RuleError,
    SortMismatch,
    TypeMismatch,
    TypingError,
    UnboundConstant,
    UnboundVariable,
    Untypable,
)
from .kernel import (
    EMPTY_CONTEXT,
    KIND,
    TYPE,
    App,
    BVar,
    Const,
    Context,
    FVar,
    Lam,
    Pi,
    Sort,
    Term,
    close,
    free_vars,
    fresh_name,
    instantiate,
    unspine,
)
from .reduction import Base, Reducer, RewriteRule, Theory


@dataclass(frozen=True)
class Judgment:
    context: Context
    subject: Term
    type: Term


class Checker:
    """Typing for one theory.  Each conversion test gets a fresh step budget."""

    def __init__(self, theory: Theory, budget: int | None = None):
        self.theory = theory
        self.budget = budget

    def reducer(self) -> Reducer:
        return Reducer(self.theory, self.budget)

    def whnf(self, t: Term) -> Term:
        return self.reducer().whnf(t)

    def conv(self, a: Term, b: Term) -> bool:
        return self.reducer().conv(a, b)

    def normal_or_self(self, t: Term) -> Term:
        try:
            return self.reducer().normalize(t)
        except (BudgetExceeded, RecursionError):
            return t

    # -- inference ----------------------------------------------------------

    def infer(self, ctx: Context, t: Term) -> Term:
        match t:
            case Sort(kind):
                if kind:
                    raise Untypable("KIND has no type")
                return KIND
            case FVar(name):
                ty = ctx.lookup(name)
                if ty is None:
                    raise UnboundVariable(f"unbound variable {name}")
                return ty
            case BVar(i):
                raise UnboundVariable(f"loose bound variable #{i}")
            case Const(name):
                entry = self.theory.lookup(name)
                if entry is None:
                    raise UnboundConstant(f"unknown constant {name}")
                return entry.type
            case Pi(dom, body, name):
                self.check_domain(ctx, dom)
                x = fresh_name(name)
                s = self.whnf(self.infer(ctx.extend(x, dom), instantiate(body, FVar(x))))
                if not isinstance(s, Sort):
                    raise SortMismatch(
                        f"codomain of a product must be a type or a kind, found "
                        f"something of type {s}"
                    )
                return s
            case Lam(dom, body, name):
                self.check_domain(ctx, dom)
                x = fresh_name(name)
                inner = ctx.extend(x, dom)
                b_ty = self.infer(inner, instantiate(body, FVar(x)))
                if b_ty == KIND:
                    raise SortMismatch("cannot abstract over a term whose type is KIND")
                if b_ty != TYPE:
                    s = self.whnf(self.infer(inner, b_ty))
                    if not isinstance(s, Sort):
                        raise SortMismatch(f"type {b_ty} of abstraction body is not sorted")
                return Pi(dom, close(b_ty, x), name)
            case App(fn, arg):
                f_ty = self.whnf(self.infer(ctx, fn))
                if not isinstance(f_ty, Pi):
                    raise NotAProduct(
                        f"{fn} is applied to {arg} but has non-product type {f_ty}"
                    )
                self.check(ctx, arg, f_ty.domain)
                return instantiate(f_ty.body, arg)
        raise TypeError(f"not a term: {t!r}")

    def check_domain(self, ctx: Context, dom: Term) -> None:
        if dom == KIND:
            raise KindAsDomain("KIND cannot be a binder annotation")
        s = self.whnf(self.infer(ctx, dom))
        if s != TYPE:
            raise SortMismatch(f"binder annotation {dom} must have type TYPE, found {s}")

    def check(self, ctx: Context, t: Term, expected: Term) -> None:
        found = self.infer(ctx, t)
        if not self.conv(found, expected):
            exp_n = self.normal_or_self(expected)
            found_n = self.normal_or_self(found)
            raise TypeMismatch(
                f"{t} has type {found_n} but {exp_n} was expected",
                expected=exp_n,
                found=found_n,
            )

    def check_sort(self, ctx: Context, ty: Term) -> Sort:
        """``ty`` must be KIND-free-typed: its type reduces to TYPE or KIND."""
        s = self.whnf(self.infer(ctx, ty))
        if not isinstance(s, Sort):
            raise SortMismatch(f"{ty} is neither a type nor a kind")
        return s

    def check_context(self, ctx: Context) -> None:
        seen: set[str] = set()
        prefix = EMPTY_CONTEXT
        for name, ty in ctx.entries:
            if name in seen:
                raise DuplicateName(f"variable {name} declared twice in context")
            seen.add(name)
            if ty == KIND:
                raise KindAsDomain(f"variable {name} cannot have type KIND")
            self.check_sort(prefix, ty)
            prefix = prefix.extend(name, ty)

    # -- rewrite rules ------------------------------------------------------

    def infer_rule_context(self, variables, lhs: Term) -> tuple[tuple[str, Term], ...]:
        """Types of the pattern variables, read off the lhs argument positions."""
        pvars = set(variables)
        found: dict[str, Term] = {}

        def walk(pat: Term, expected: Term | None) -> Term:
            if isinstance(pat, FVar) and pat.name in pvars:
                if expected is None:
                    raise RuleError(
                        f"pattern variable {pat.name} occurs in head position"
                    )
                if pat.name in found:
                    if not self.conv(found[pat.name], expected):
                        raise TypeMismatch(
                            f"pattern variable {pat.name} used at two types",
                            expected=found[pat.name],
                            found=expected,
                        )
                else:
                    found[pat.name] = expected
                return expected
            head, args = unspine(pat)
            if not isinstance(head, Const):
                raise RuleError(f"pattern {pat} must be headed by a constant")
            entry = self.theory.lookup(head.name)
            if entry is None:
                raise UnboundConstant(f"unknown constant {head.name}")
            ty = entry.type
            for a in args:
                ty = self.whnf(ty)
                if not isinstance(ty, Pi):
                    raise NotAProduct(f"{head.name} is applied to too many arguments")
                walk(a, ty.domain)
                ty = instantiate(ty.body, a)
            return ty

        walk(lhs, None)
        missing = pvars - set(found)
        if missing:
            raise RuleError(f"variables {sorted(missing)} do not occur in the pattern")
        order = [v for v in variables]
        # dependency order: first occurrence in the pattern
        first = {}
        for i, n in enumerate(_fvar_order(lhs)):
            first.setdefault(n, i)
        order.sort(key=lambda v: first.get(v, 0))
        return tuple((v, found[v]) for v in order)

    def check_rule(self, rule: RewriteRule, hol: bool | None = None) -> Term:
        """Validate a rule and return the common type of both sides."""
        head, _ = unspine(rule.lhs)
        if not isinstance(head, Const):
            raise RuleError(f"left-hand side {rule.lhs} is not headed by a constant")
        entry = self.theory.lookup(head.name)
        if entry is None:
            raise UnboundConstant(f"unknown constant {head.name}")
        if not entry.definable:
            raise HeadNotDefinable(
                f"{head.name} is not declared with 'def' and cannot carry rules"
            )
        lhs_vars = free_vars(rule.lhs)
        if set(rule.variables) != set(lhs_vars):
            raise RuleError("rule context must list exactly the lhs variables")
        if not free_vars(rule.rhs) <= lhs_vars:
            raise RuleError("rhs uses variables absent from the lhs")
        ctx = Context(rule.context)
        self.check_context(ctx)
        lhs_ty = self.infer(ctx, rule.lhs)
        rhs_ty = self.infer(ctx, rule.rhs)
        if not self.conv(lhs_ty, rhs_ty):
            raise TypeMismatch(
                f"rule sides have different types: {self.normal_or_self(lhs_ty)} "
                f"and {self.normal_or_self(rhs_ty)}",
                expected=lhs_ty,
                found=rhs_ty,
            )
        if hol is None:
            hol = self.theory.base is not Base.BARE
        if hol:
            from .holtheory import KappaClass, kappa_class

            kc = kappa_class(self.normal_or_self(lhs_ty))
            if kc is KappaClass.K3:
                raise ProofLevelRule(
                    f"rule rewrites proofs (its type {lhs_ty} is a formula)"
                )
        return lhs_ty


def _fvar_order(t: Term) -> list[str]:
    out = []

    def go(t):
        match t:
            case FVar(n):
                out.append(n)
            case App(f, a):
                go(f)
                go(a)
            case Pi(d, b) | Lam(d, b):
                go(d)
                go(b)

    go(t)
    return out


# -- module-level entry points ----------------------------------------------------


def infer(th: Theory, ctx: Context, t: Term, budget: int | None = None) -> Term:
    return Checker(th, budget).infer(ctx, t)


def judge(th: Theory, ctx: Context, t: Term) -> Judgment:
    return Judgment(ctx, t, infer(th, ctx, t))


def check(th: Theory, ctx: Context, t: Term, expected: Term, budget: int | None = None) -> None:
    Checker(th, budget).check(ctx, t, expected)


def check_context(th: Theory, ctx: Context) -> None:
    Checker(th).check_context(ctx)


def check_rule(th: Theory, rule: RewriteRule, hol: bool | None = None) -> Term:
    return Checker(th).check_rule(rule, hol)


def check_declared_type(th: Theory, name: str, ty: Term) -> Sort:
    if free_vars(ty):
        raise NotClosed(f"type of {name} has free variables {sorted(free_vars(ty))}")
    if ty == KIND:
        raise Untypable(f"{name} cannot have type KIND")
    return Checker(th).check_sort(EMPTY_CONTEXT, ty)


@dataclass
class ItemStatus:
    kind: str  # "const" or "rule"
    name: str
    error: KernelError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class TheoryReport:
    items: list[ItemStatus] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.items)

    @property
    def failures(self) -> list[ItemStatus]:
        return [i for i in self.items if not i.ok]


def check_theory(th: Theory) -> TheoryReport:
    """Check every constant type (closed, sorted) and every rule, in order."""
    report = TheoryReport()
    checker = Checker(th)
    for name, entry in th.signature.items():
        try:
            check_declared_type(th, name, entry.type)
            report.items.append(ItemStatus("const", name))
        except (TypingError, BudgetExceeded) as e:
            report.items.append(ItemStatus("const", name, e))
    for i, rule in enumerate(th.rules):
        label = rule.name or f"rule#{i} ({rule.head})"
        try:
            checker.check_rule(rule)
            report.items.append(ItemStatus("rule", label))
        except (TypingError, BudgetExceeded) as e:
            report.items.append(ItemStatus("rule", label, e))
    return report
