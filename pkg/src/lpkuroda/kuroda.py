"""Kuroda's double-negation translation for HOL-encoded theories.

``Prf`` becomes ``p : Prop => Prf (not (not p))``, ``all`` gains a double
negation under the binder, each natural deduction constant (and ``pem``) is
replaced by an intuitionistic proof of its translated type, and everything
else is mapped structurally.  The intuitionistic proofs live in the shipped
``witnesses.dk`` file and are re-checked whenever it is loaded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InvalidTranslatedRule, UnknownWitness, ValidationError
from .frontend import (
    ConstDecl,
    Declaration,
    RuleDecl,
    SourceFile,
    ThmDecl,
    parse,
    parse_term,
)
from .holtheory import (
    BASE_NAMES,
    ND_CONSTANTS,
    PEM,
    hol_base,
    read_fixture,
    user_constants,
    user_rules,
    validate_hol_encoded,
)
from .kernel import (
    App,
    BVar,
    Const,
    Lam,
    Pi,
    Term,
    app,
    constants,
    instantiate,
    replace_consts,
    shift,
    unspine,
)
from .reduction import Base, RewriteRule, Theory

WITNESSED = ND_CONSTANTS + (PEM,)

PRF_KU = parse_term("p : Prop => Prf (not (not p))", known=BASE_NAMES)
ALL_KU = parse_term(
    "a : Set => p : (El a -> Prop) => all a (z : El a => not (not (p z)))",
    known=BASE_NAMES,
)
_MARKERS = (PRF_KU, ALL_KU)

_PRF, _ALL, _EL, _NOT = Const("Prf"), Const("all"), Const("El"), Const("not")


def witness_name(c: str) -> str:
    """Name under which the witness prelude proves the translated rule ``c``."""
    return f"{c}_i"


def _not_not(t: Term) -> Term:
    return App(_NOT, App(_NOT, t))


# -- the translation on terms ----------------------------------------------------


def kuroda_term(t: Term, witnesses: dict[str, Term] | None = None) -> Term:
    """The structural translation.  Natural deduction constants become
    references to their witnesses, or the terms in ``witnesses`` if given."""

    def go(t: Term) -> Term:
        match t:
            case Const("Prf"):
                return PRF_KU
            case Const("all"):
                return ALL_KU
            case Const(name) if name in WITNESSED:
                if witnesses is not None:
                    return witnesses[name]
                return Const(witness_name(name))
            case App(f, a):
                return App(go(f), go(a))
            case Pi(d, b, n):
                return Pi(go(d), go(b), n)
            case Lam(d, b, n):
                return Lam(go(d), go(b), n)
        return t

    return go(t)


def _all_nn(a: Term, p: Term) -> Term:
    # all a (z : El a => not (not (p z))), contracting p z when p is a lambda
    if isinstance(p, Lam):
        body, name = p.body, p.name
    else:
        body, name = App(shift(p, 1), BVar(0)), "z"
    return app(_ALL, a, Lam(App(_EL, a), _not_not(body), name))


def tidy(t: Term) -> Term:
    """Contract every application of the translated ``Prf`` and ``all``.

    No other redex is touched.  When the predicate given to the translated
    ``all`` is itself an abstraction, the redex this creates under the new
    binder is contracted too, so ``all a (x => P)`` reads back as
    ``all a (x => not (not P))``.
    """
    h, args = unspine(t)
    args = [tidy(a) for a in args]
    if h == PRF_KU and args:
        return app(App(_PRF, _not_not(args[0])), *args[1:])
    if h == ALL_KU and len(args) >= 2:
        return app(_all_nn(args[0], args[1]), *args[2:])
    if h == ALL_KU and len(args) == 1:
        return instantiate(ALL_KU.body, args[0])
    match h:
        case Pi(d, b, n):
            h = Pi(tidy(d), tidy(b), n)
        case Lam(d, b, n) if h not in _MARKERS:
            h = Lam(tidy(d), tidy(b), n)
    return app(h, *args)


def floor_head(t: Term) -> Term:
    """Beta-reduce a translated ``Prf``/``all`` sitting at the head of ``t``."""
    h, args = unspine(t)
    reduced = False
    while args and isinstance(h, Lam) and (reduced or h in _MARKERS):
        h, rest = unspine(instantiate(h.body, args[0]))
        args = rest + args[1:]
        reduced = True
    return app(h, *args)


def kuroda_rule(r: RewriteRule, tidy_output: bool = True) -> RewriteRule:
    """Translate a rule: floor the left-hand side, translate the rest."""
    finish = tidy if tidy_output else (lambda t: t)
    head, args = unspine(floor_head(kuroda_term(r.lhs)))
    if not isinstance(head, Const):
        raise InvalidTranslatedRule(
            f"translated left-hand side of {r} has no constant head"
        )
    # arguments are always tidied: matching is syntactic, and the terms the
    # rule has to match are tidied as well
    lhs = app(head, *[tidy(a) for a in args])
    ctx = tuple((n, finish(kuroda_term(ty))) for n, ty in r.context)
    return RewriteRule(ctx, lhs, finish(kuroda_term(r.rhs)), r.name)


# -- witnesses -------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessTable:
    """The checked witness prelude.

    ``theory`` is the intuitionistic base extended with the prelude;
    ``inlined`` maps each prelude theorem to a closed proof over the base
    alone (helper lemmas substituted away).
    """

    theory: Theory
    prelude: SourceFile
    inlined: dict[str, Term] = field(repr=False)

    def witness(self, c: str, inline: bool = True) -> Term:
        if c not in WITNESSED:
            raise UnknownWitness(f"no witness for {c}: not a natural deduction constant")
        name = witness_name(c)
        return self.inlined[name] if inline else Const(name)


@lru_cache(maxsize=None)
def witness_table() -> WitnessTable:
    from .elaborate import elaborate

    base = hol_base(False)
    prelude = parse(read_fixture("witnesses.dk"), known=base.signature, path="witnesses.dk")
    result = elaborate(prelude, base)
    if not result.ok:
        raise RuntimeError(f"witness prelude does not check: {result.failures}")
    classical = hol_base(True)
    for c in WITNESSED:
        want = tidy(kuroda_term(classical.lookup(c).type))
        got = result.theory.lookup(witness_name(c))
        if got is None or got.type != want:
            raise RuntimeError(f"witness for {c} does not prove its translated type")
    inlined: dict[str, Term] = {}
    for d in prelude.declarations:
        inlined[d.name] = replace_consts(d.proof, inlined)
    for name, term in inlined.items():
        if PEM in constants(term):
            raise RuntimeError(f"witness {name} uses excluded middle")
    th = result.theory.with_base(Base.INTUITIONISTIC)
    return WitnessTable(th, prelude, inlined)


def nd_witness(name: str) -> Term:
    """The closed intuitionistic witness for a natural deduction constant or pem."""
    return witness_table().witness(name, inline=True)


def _witness_map(inline: bool) -> dict[str, Term] | None:
    if not inline:
        return None
    table = witness_table()
    return {c: table.witness(c) for c in WITNESSED}


def target_theory(inline: bool = False) -> Theory:
    """Where translated theories live: the intuitionistic base, plus the
    witness prelude unless witnesses are inlined."""
    return hol_base(False) if inline else witness_table().theory


# -- theories and files ----------------------------------------------------------


def _validated(th: Theory, pedantic: bool) -> None:
    report = validate_hol_encoded(th, pedantic)
    if not report.ok:
        lines = "; ".join(str(v) for v in report.violations)
        raise ValidationError(f"theory is not HOL-encoded: {lines}")


def kuroda_theory(
    th: Theory, tidy_output: bool = True, inline: bool = False, pedantic: bool = False
) -> Theory:
    """Translate every user constant and rule of ``th`` over the intuitionistic base."""
    _validated(th, pedantic)
    finish = tidy if tidy_output else (lambda t: t)
    wmap = _witness_map(inline)
    out = target_theory(inline)
    for name in user_constants(th):
        entry = th.lookup(name)
        out = out.add_const(name, finish(kuroda_term(entry.type, wmap)), entry.definable)
    for rule in user_rules(th):
        out = out.add_rule(kuroda_rule(rule, tidy_output))
    return out


@dataclass
class TranslatedTheorem:
    name: str
    statement: Term
    proof: Term


@dataclass
class TranslationOutput:
    theory: Theory
    entries: list[TranslatedTheorem]
    declarations: list[Declaration]
    inline: bool = False

    def file_declarations(self) -> list[Declaration]:
        """What gets printed: the prelude (unless inlined), then the user part."""
        if self.inline:
            return list(self.declarations)
        return list(witness_table().prelude.declarations) + self.declarations


def translate_declarations(
    decls: list[Declaration],
    rules: dict[int, RewriteRule],
    tidy_output: bool = True,
    inline: bool = False,
) -> list[Declaration]:
    """Translate a checked declaration stream.  ``rules`` holds the elaborated
    rule for each rule declaration, keyed by position."""
    finish = tidy if tidy_output else (lambda t: t)
    wmap = _witness_map(inline)

    def tr(t: Term) -> Term:
        return finish(kuroda_term(t, wmap))

    out: list[Declaration] = []
    for idx, d in enumerate(decls):
        match d:
            case ConstDecl(name, ty, definable, span):
                out.append(ConstDecl(name, tr(ty), definable, span))
            case RuleDecl(vs, _, _, span):
                r = kuroda_rule(rules[idx], tidy_output)
                out.append(RuleDecl(vs, r.lhs, r.rhs, span))
            case ThmDecl(name, stmt, proof, span):
                out.append(ThmDecl(name, tr(stmt), tr(proof), span))
    return out


def translate_source(
    source: SourceFile,
    theory: Theory,
    rules: dict[int, RewriteRule],
    tidy_output: bool = True,
    inline: bool = False,
    pedantic: bool = False,
) -> TranslationOutput:
    """Translate a file already elaborated into ``theory``."""
    reserved = set(witness_table().inlined) if not inline else set()
    clash = reserved & set(source.declared_names())
    if clash:
        raise ValidationError(
            f"names reserved for the witness prelude: {', '.join(sorted(clash))}"
        )
    th = kuroda_theory(theory, tidy_output, inline, pedantic)
    decls = translate_declarations(source.declarations, rules, tidy_output, inline)
    entries = [
        TranslatedTheorem(d.name, d.statement, d.proof)
        for d in decls
        if isinstance(d, ThmDecl)
    ]
    return TranslationOutput(th, entries, decls, inline)
