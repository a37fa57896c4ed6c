"""Turn a parsed declaration stream into a checked theory, one item at a time."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceeded, KernelError, TypingError
from .frontend import ConstDecl, Declaration, RuleDecl, SourceFile, ThmDecl
from .kernel import EMPTY_CONTEXT, head_of
from .reduction import RewriteRule, Theory
from .typecheck import Checker, check_declared_type


@dataclass
class DeclStatus:
    decl: Declaration
    error: KernelError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def name(self) -> str:
        if isinstance(self.decl, RuleDecl):
            return f"rule {format_rule_head(self.decl)}"
        return self.decl.name

    @property
    def span(self):
        return self.decl.span


def format_rule_head(d: RuleDecl) -> str:
    h = head_of(d.lhs)
    return getattr(h, "name", "?")


@dataclass
class Elaboration:
    theory: Theory
    statuses: list[DeclStatus] = field(default_factory=list)
    rules: dict[int, RewriteRule] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.statuses)

    @property
    def failures(self) -> list[DeclStatus]:
        return [s for s in self.statuses if not s.ok]

    @property
    def theorems(self) -> list[ThmDecl]:
        return [s.decl for s in self.statuses if isinstance(s.decl, ThmDecl)]


def rule_from_decl(theory: Theory, d: RuleDecl, budget: int | None = None) -> RewriteRule:
    ctx = Checker(theory, budget).infer_rule_context(d.vars, d.lhs)
    return RewriteRule(ctx, d.lhs, d.rhs)


def elaborate(
    source: SourceFile | list[Declaration],
    theory: Theory,
    budget: int | None = None,
    check: bool = True,
) -> Elaboration:
    """Check declarations in order, extending ``theory`` with each success.

    A theorem whose proof fails is still added (its statement is what later
    declarations rely on) provided the statement itself is well sorted.
    """
    decls = source.declarations if isinstance(source, SourceFile) else source
    result = Elaboration(theory)
    th = theory
    for idx, d in enumerate(decls):
        status = DeclStatus(d)
        try:
            match d:
                case ConstDecl(name, ty, definable):
                    if check:
                        check_declared_type(th, name, ty)
                    th = th.add_const(name, ty, definable)
                case RuleDecl():
                    rule = rule_from_decl(th, d, budget)
                    if check:
                        Checker(th, budget).check_rule(rule)
                    th = th.add_rule(rule)
                    result.rules[idx] = rule
                case ThmDecl(name, stmt, proof):
                    if check:
                        check_declared_type(th, name, stmt)
                    prev, th = th, th.add_const(name, stmt)
                    if check:
                        Checker(prev, budget).check(EMPTY_CONTEXT, proof, stmt)
        except (TypingError, BudgetExceeded, RecursionError) as e:
            if isinstance(e, RecursionError):
                e = BudgetExceeded("term too deep to check")
            if e.span is None and d.span is not None:
                e.span = d.span
            status.error = e
        result.statuses.append(status)
    result.theory = th
    return result
