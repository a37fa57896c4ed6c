"""Shared fixtures, corpora and term generators for the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from lpkuroda import errors
from lpkuroda.elaborate import Elaboration, elaborate
from lpkuroda.frontend import (
    DuplicateDeclaration,
    ParseError,
    RuleVariableError,
    SourceFile,
    UnboundIdentifier,
    parse,
    parse_term,
)
from lpkuroda.holtheory import Check, hol_base, validate_hol_encoded
from lpkuroda.kernel import (
    KIND,
    TYPE,
    App,
    BVar,
    Const,
    FVar,
    Lam,
    Pi,
    Sort,
    Term,
    has_loose_bvars,
    subterms,
)
from lpkuroda.kuroda import translate_source
from lpkuroda.reduction import Theory, one_step_reducts

FIXTURES = Path(str(resources.files("lpkuroda").joinpath("fixtures")))
LIBRARY = sorted((FIXTURES / "library").glob("*.dk"))
EXAMPLES = FIXTURES / "examples"
ALL_SOURCE_FILES = LIBRARY + [EXAMPLES / "leibniz.dk", EXAMPLES / "addition.dk"]
TRANSLATABLE = LIBRARY + [EXAMPLES / "leibniz.dk"]


def term(text: str, th: Theory | None = None, variables=()) -> Term:
    """Parse a term over the classical base (or ``th``)."""
    th = th or hol_base(True)
    return parse_term(text, known=th.signature, variables=variables)


@lru_cache(maxsize=None)
def load(path: Path, classical: bool = True) -> tuple[SourceFile, Elaboration]:
    base = hol_base(classical)
    source = parse(path.read_text(), known=base.signature, path=str(path))
    return source, elaborate(source, base)


def theory_of(text: str, classical: bool = True) -> Theory:
    base = hol_base(classical)
    result = elaborate(parse(text, known=base.signature), base)
    assert result.ok, [str(s.error) for s in result.failures]
    return result.theory


@lru_cache(maxsize=None)
def translated(path: Path, inline: bool = False):
    source, elab = load(path)
    return translate_source(source, elab.theory, elab.rules, inline=inline)


# -- ill-formed inputs -------------------------------------------------------------


@dataclass(frozen=True)
class BadInput:
    label: str
    text: str
    expected: type | Check
    pedantic: bool = False
    budget: int | None = None


NAT = "nat : Set. 0 : El nat. S : El nat -> El nat. def add : El nat -> El nat -> El nat.\n"

BAD_INPUTS = [
    # rejected by the parser
    BadInput("unbound identifier in a type", "c : Prf foo.", UnboundIdentifier),
    BadInput("unbound identifier in a proof", "thm t : Prf top := nope.", UnboundIdentifier),
    BadInput("forward reference", "c : El d. d : Set.", UnboundIdentifier),
    BadInput("duplicate declaration", "c : Set. c : Set.", DuplicateDeclaration),
    BadInput("redeclared base constant", "Prf : Prop -> Type.", DuplicateDeclaration),
    BadInput("redeclared excluded middle", "pem : Prf top.", DuplicateDeclaration),
    BadInput("missing terminating dot", "c : Set", ParseError),
    BadInput("unterminated comment", "c : Set. (; never closed", ParseError),
    BadInput("stray character", "c : Set & Set.", ParseError),
    BadInput("keyword used as a name", "Type : Set.", ParseError),
    BadInput("binder without a type", "thm t : Prf (imp top top) := imp_i top top (h => h).", ParseError),
    BadInput("unused rule variable", NAT + "[x, y] add x 0 --> x.", RuleVariableError),
    BadInput("rule variable not listed", NAT + "[] add x 0 --> x.", UnboundIdentifier),
    BadInput("right-hand side variable not on the left", NAT + "[x, y] add x 0 --> y.", RuleVariableError),
    BadInput("repeated rule variable", NAT + "[x, x] add x 0 --> x.", RuleVariableError),
    # rejected by the type checker
    BadInput("Kind as a domain", "c : Kind -> Type.", errors.KindAsDomain),
    BadInput("Kind as a declared type", "c : Kind.", errors.Untypable),
    BadInput("application of a non-function", "c : Prf (top top).", errors.NotAProduct),
    BadInput("too many arguments in a proof", "thm t : Prf top := top_i top.", errors.NotAProduct),
    BadInput("sort where a proposition is expected", "c : Prf (not Set).", errors.TypeMismatch),
    BadInput("proof of the wrong statement", "thm bad : Prf bot := top_i.", errors.TypeMismatch),
    BadInput("lambda body of the wrong type", "thm t : Prf (imp top top) := imp_i top top (h : Prf top => top).", errors.TypeMismatch),
    BadInput("proposition used as a domain", "c : top -> Prop.", errors.SortMismatch),
    BadInput("codomain not a type", "c : Prop -> top.", errors.SortMismatch),
    BadInput("binder over Type", "thm t : Prop := x : Type => top.", errors.SortMismatch),
    BadInput("statement that is a proof", "thm t : top_i := top_i.", errors.SortMismatch),
    BadInput("rule head not definable", "c : El o. [] c --> top.", errors.HeadNotDefinable),
    BadInput("rule sides of different types", "def f : El o. [] f --> Set.", errors.TypeMismatch),
    BadInput("rule rewriting proofs", "def p0 : Prf top. [] p0 --> top_i.", errors.ProofLevelRule),
    BadInput("rule variable in head position", "def g : Prop -> Prop. [h] g (h top) --> top.", errors.RuleError),
    BadInput("non-terminating rule", "def loop : El o. [] loop --> loop. thm t : Prf loop := top_i.", errors.BudgetExceeded, budget=2000),
    # rejected by HOL validation
    BadInput("propositions feeding sorts", "f : Prop -> Set.", Check.KAPPA),
    BadInput("proofs feeding sorts", "g : Prf top -> Set.", Check.KAPPA),
    BadInput("proof premise of a proposition", "k : Set -> Prf top -> Prop.", Check.KAPPA),
    BadInput("dependency on a proof", "d : h : Prf top -> Prf (imp top top) -> Set.", Check.KAPPA),
    BadInput("rule on bare Prf", "[] Prf --> p : Prop => Prf p.", Check.LHS),
    BadInput("base rule redeclared", "[x, y] El (arrow x y) --> El x -> El y.", Check.BASE_RULES),
    BadInput(
        "Prf-headed rule, strict reading",
        "eq : a : Set -> El a -> El a -> Prop.\n"
        "[a, x, y] Prf (eq a x y) --> P : (El a -> Prop) -> Prf (P x) -> Prf (P y).",
        Check.LHS,
        pedantic=True,
    ),
]


def classify_failure(case: BadInput, classical: bool = True) -> object:
    """Run a case through parse, elaborate, validate; return what rejected it."""
    base = hol_base(classical)
    try:
        source = parse(case.text, known=base.signature)
    except ParseError as e:
        return e
    result = elaborate(source, base, budget=case.budget)
    if not result.ok:
        return result.failures[0].error
    report = validate_hol_encoded(result.theory, case.pedantic)
    if not report.ok:
        return report.violations[0].check
    return None


def failure_matches(case: BadInput, got: object) -> bool:
    if isinstance(case.expected, Check):
        return got is case.expected
    return isinstance(got, case.expected)


# -- random terms ------------------------------------------------------------------

SIG_CONSTANTS = [
    "Prf", "all", "ex", "imp", "and", "or", "not", "top", "bot", "El", "Set", "Prop",
    "o", "arrow", "imp_i", "imp_e", "and_i", "or_e", "neg_i", "top_i", "all_i", "all_e",
    "ex_e", "pem", "eq", "nat", "0", "S", "add",
]
VAR_NAMES = ["z", "w", "u", "v"]


def random_term(rng: random.Random, depth: int, bound: int = 0, fvars=VAR_NAMES) -> Term:
    """A well-scoped (not necessarily well-typed) term."""
    choices = ["const", "fvar"] + (["bvar"] if bound else [])
    if depth > 0:
        choices += ["app", "app", "lam", "pi"]
    match rng.choice(choices):
        case "const":
            return Const(rng.choice(SIG_CONSTANTS))
        case "fvar":
            return FVar(rng.choice(fvars))
        case "bvar":
            return BVar(rng.randrange(bound))
        case "app":
            return App(random_term(rng, depth - 1, bound, fvars), random_term(rng, depth - 1, bound, fvars))
        case kind:
            dom = random_term(rng, depth - 1, bound, fvars)
            body = random_term(rng, depth - 1, bound + 1, fvars)
            name = rng.choice(["x", "y", "p", "z"])
            return (Lam if kind == "lam" else Pi)(dom, body, name)


# well-typed closed terms over the arithmetic theory, grouped by type


def _nat(rng: random.Random, d: int) -> str:
    if d <= 0:
        return rng.choice(["0", "(S 0)"])
    return rng.choice([
        "0",
        f"(S {_nat(rng, d - 1)})",
        f"(add {_nat(rng, d - 1)} {_nat(rng, d - 1)})",
        f"(pred {_nat(rng, d - 1)})",
        f"((n : El nat => S n) {_nat(rng, d - 1)})",
    ])


def _set(rng: random.Random, d: int) -> str:
    if d <= 0:
        return rng.choice(["nat", "o"])
    return rng.choice(["nat", "o", f"(arrow {_set(rng, d - 1)} {_set(rng, d - 1)})"])


def _prop(rng: random.Random, d: int) -> str:
    if d <= 0:
        return rng.choice(["top", "bot", "(is_zero 0)"])
    p = lambda: _prop(rng, d - 1)  # noqa: E731
    n = lambda: _nat(rng, d - 1)  # noqa: E731
    return rng.choice([
        f"(imp {p()} {p()})",
        f"(and {p()} {p()})",
        f"(iff {p()} {p()})",
        f"(not {p()})",
        f"(is_zero {n()})",
        f"(eq nat {n()} {n()})",
        f"(all nat (x : El nat => eq nat x {n()}))",
        f"(ex nat (x : El nat => is_zero (add x {n()})))",
        f"((q : Prop => and q q) {p()})",
        f"(all o (q : El o => imp q {p()}))",
    ])


def random_typed(rng: random.Random, depth: int = 3) -> str:
    return rng.choice([
        f"Prf {_prop(rng, depth)}",
        f"El {_set(rng, depth)}",
        f"Prf (all nat (x : El nat => eq nat (add x 0) {_nat(rng, depth)}))",
        f"El (arrow nat {_set(rng, depth - 1)}) -> Prf {_prop(rng, depth - 1)}",
        _prop(rng, depth),
    ])


def reduction_pairs(th: Theory, starts: list[Term], n: int, seed: int) -> list[tuple[Term, Term]]:
    """Pairs ``(a, b)`` where ``b`` is reached from ``a`` by 1 to 3 random
    single reduction steps."""
    rng = random.Random(seed)
    pairs = []
    pool = [t for t in starts if next(one_step_reducts(th, t), None) is not None]
    while len(pairs) < n and pool:
        a = rng.choice(pool)
        b = a
        for _ in range(rng.randint(1, 3)):
            steps = list(one_step_reducts(th, b))
            if not steps:
                break
            b = rng.choice(steps)
        if b != a:
            pairs.append((a, b))
    return pairs


def closed_subterms(t: Term) -> list[Term]:
    return [s for s in subterms(t) if not has_loose_bvars(s)]


def is_sort(t: Term) -> bool:
    return isinstance(t, Sort) and t in (TYPE, KIND)
