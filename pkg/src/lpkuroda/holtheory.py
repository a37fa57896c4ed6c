"""The higher-order logic base theory, kappa classification, and the check
that a user theory is an extension of HOL that the translation accepts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .errors import KernelError
from .kernel import KIND, TYPE, Const, Context, Pi, Term, references_bvar, unspine
from .reduction import Base, Theory, beta_normalize

SORT_CONSTANTS = ("Set", "El", "arrow", "o", "Prop", "Prf")
CONNECTIVES = ("imp", "and", "or", "not", "top", "bot", "all", "ex", "iff")
ND_CONSTANTS = (
    "imp_i",
    "imp_e",
    "and_i",
    "and_el",
    "and_er",
    "or_il",
    "or_ir",
    "or_e",
    "neg_i",
    "neg_e",
    "top_i",
    "bot_e",
    "all_i",
    "all_e",
    "ex_i",
    "ex_e",
)
BASE_NAMES = frozenset(SORT_CONSTANTS + CONNECTIVES + ND_CONSTANTS)
PEM = "pem"


def read_fixture(name: str) -> str:
    return resources.files("lpkuroda").joinpath("fixtures", name).read_text("utf-8")


@lru_cache(maxsize=None)
def _intuitionistic() -> Theory:
    from .elaborate import elaborate
    from .frontend import parse

    result = elaborate(parse(read_fixture("hol.dk"), path="hol.dk"), Theory())
    if not result.ok:  # pragma: no cover - the shipped file is checked by tests
        raise RuntimeError(f"base theory does not check: {result.failures}")
    return result.theory.with_base(Base.INTUITIONISTIC)


@lru_cache(maxsize=None)
def _classical() -> Theory:
    from .elaborate import elaborate
    from .frontend import parse

    base = _intuitionistic()
    result = elaborate(parse(read_fixture("pem.dk"), known=base.signature), base)
    if not result.ok:  # pragma: no cover
        raise RuntimeError(f"pem does not check: {result.failures}")
    return result.theory.with_base(Base.CLASSICAL)


def hol_base(classical: bool) -> Theory:
    """The base HOL theory; ``classical`` adds the excluded-middle axiom."""
    return _classical() if classical else _intuitionistic()


def base_rules():
    return _intuitionistic().rules


# -- kappa classification --------------------------------------------------------


class KappaClass(enum.Enum):
    K1 = 1
    K2 = 2
    K3 = 3
    K4 = 4
    K5 = 5
    NONE = 0


def _is_const_app(t: Term, name: str, nargs: int) -> bool:
    h, args = unspine(t)
    return isinstance(h, Const) and h.name == name and len(args) == nargs


def kappa_class(a: Term) -> KappaClass:
    """Which of the five grammars generates ``a`` (no reduction performed)."""
    if a == KIND:
        return KappaClass.K5
    if a == TYPE:
        return KappaClass.K4
    if a == Const("Set"):
        return KappaClass.K1
    if a == Const("Prop") or _is_const_app(a, "El", 1):
        return KappaClass.K2
    if _is_const_app(a, "Prf", 1):
        return KappaClass.K3
    if not isinstance(a, Pi):
        return KappaClass.NONE
    dom = kappa_class(a.domain)
    cod = kappa_class(a.body)
    dependent = references_bvar(a.body, 0)
    object_level = dom in (KappaClass.K1, KappaClass.K2)
    match cod:
        case KappaClass.K1:
            ok = dom is KappaClass.K1 and not dependent
        case KappaClass.K2 | KappaClass.K4:
            ok = object_level
        case KappaClass.K3:
            ok = object_level or (dom is KappaClass.K3 and not dependent)
        case _:
            ok = False
    return cod if ok else KappaClass.NONE


def kappa_class_modulo_beta(a: Term) -> KappaClass:
    k = kappa_class(a)
    if k is KappaClass.NONE:
        k = kappa_class(beta_normalize(a))
    return k


# -- validating a HOL-encoded theory ----------------------------------------------


class Check(enum.Enum):
    BASE = "base"  # base constants present and untouched
    BASE_RULES = "base-rules"  # base rules present, user rules distinct
    KAPPA = "kappa"  # user constant types generated by a kappa grammar
    LHS = "lhs"  # rule left-hand sides the translation can floor
    PROOF_RULE = "proof-rule"  # no rule rewrites proofs


@dataclass
class Violation:
    check: Check
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.check.value}] {self.subject}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check: Check, subject: str, message: str) -> None:
        self.violations.append(Violation(check, subject, message))

    def failed(self, check: Check) -> bool:
        return any(v.check is check for v in self.violations)


@lru_cache(maxsize=None)
def witness_prelude_names() -> frozenset[str]:
    from .frontend import parse

    known = set(BASE_NAMES)
    return frozenset(parse(read_fixture("witnesses.dk"), known=known).declared_names())


def user_constants(th: Theory) -> list[str]:
    skip = set(BASE_NAMES) | {PEM}
    if th.base is Base.INTUITIONISTIC:
        skip |= witness_prelude_names()
    return [n for n in th.signature if n not in skip]


def user_rules(th: Theory):
    base = set(base_rules())
    return [r for r in th.rules if r not in base]


def validate_hol_encoded(th: Theory, pedantic: bool = False) -> ValidationReport:
    """Check that ``th`` is HOL (classical or intuitionistic) plus user items
    whose types satisfy the kappa property, with rules the translation can
    carry over."""
    from .typecheck import Checker

    report = ValidationReport()
    ref = hol_base(False)

    # base constants present, untouched, disjoint from the user part
    for name in ref.signature:
        entry = th.lookup(name)
        want = ref.lookup(name)
        if entry is None:
            report.add(Check.BASE, name, "base constant missing")
        elif entry.type != want.type or entry.definable != want.definable:
            report.add(Check.BASE, name, "base constant redeclared with a different type")
    has_pem = PEM in th
    if th.base is Base.CLASSICAL and not has_pem:
        report.add(Check.BASE, PEM, "classical base without the excluded-middle axiom")
    if th.base is not Base.CLASSICAL and has_pem:
        report.add(Check.BASE, PEM, "excluded middle declared in a non-classical theory")
    if has_pem and th.lookup(PEM).type != hol_base(True).lookup(PEM).type:
        report.add(Check.BASE, PEM, "excluded middle declared with a different type")

    # base rules present; user rules disjoint from them
    for rule in ref.rules:
        if rule not in th.rules:
            report.add(Check.BASE_RULES, f"rule on {rule.head}", "base rewrite rule missing")
    seen = set()
    for rule in th.rules:
        if rule in seen:
            report.add(Check.BASE_RULES, f"rule on {rule.head}", "rule declared twice")
        seen.add(rule)

    # kappa property for user constants
    for name in user_constants(th):
        ty = th.lookup(name).type
        if kappa_class_modulo_beta(ty) is KappaClass.NONE:
            report.add(Check.KAPPA, name, f"type {ty} is generated by no kappa grammar")

    # rule left-hand sides, and no proof-level rules
    checker = Checker(th)
    for rule in user_rules(th):
        subject = f"rule {rule.lhs}"
        if rule.lhs in (Const("Prf"), Const("all")):
            report.add(Check.LHS, subject, "left-hand side is Prf or all itself")
        elif pedantic and rule.head in ("Prf", "all"):
            report.add(Check.LHS, subject, "left-hand side is headed by Prf or all (pedantic)")
        try:
            ty = checker.infer(Context(rule.context), rule.lhs)
        except (KernelError, RecursionError) as e:
            report.add(Check.LHS, subject, f"left-hand side does not type: {e}")
            continue
        if kappa_class(checker.normal_or_self(ty)) is KappaClass.K3:
            report.add(Check.PROOF_RULE, subject, "rule rewrites proofs (type in kappa3)")

    heads = {}
    for rule in th.rules:
        heads.setdefault(rule.head, 0)
        heads[rule.head] += 1
    user_heads = {r.head for r in user_rules(th)}
    for head, n in sorted(heads.items()):
        if n > 1 and head in user_heads:
            report.notes.append(
                f"{n} rules share head {head}; confluence is assumed, not checked"
            )
    return report

