"""Parser and printer for the Dedukti-style surface syntax.

Grammar::

    file   ::= decl*
    decl   ::= ["def"] ID ":" term "."
             | "[" [ID ("," ID)*] "]" term "-->" term "."
             | "thm" ID ":" term ":=" term "."
    term   ::= ID ":" app "=>" term        abstraction
             | ID ":" app "->" term        dependent product
             | app ["->" term]             (non-dependent) arrow
    app    ::= atom+
    atom   ::= ID | "Type" | "Kind" | "(" term ")"

Comments are ``(; ... ;)`` and nest.  Identifiers are resolved while
parsing: bound variables first, then rule variables, then constants declared
earlier in the file or passed in through ``known``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import KernelError
from .kernel import (
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
    free_vars,
    references_bvar,
)

KEYWORDS = frozenset({"def", "thm", "Type", "Kind"})


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"

    def contains(self, line: int, col: int) -> bool:
        return (self.line, self.col) <= (line, col) < (self.end_line, self.end_col)


class ParseError(KernelError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(message, f"{line}:{col}")
        self.line = line
        self.col = col


class UnboundIdentifier(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass


class RuleVariableError(ParseError):
    pass


# -- declarations ---------------------------------------------------------------


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: Term
    definable: bool = False
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RuleDecl:
    vars: tuple[str, ...]
    lhs: Term
    rhs: Term
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ThmDecl:
    name: str
    statement: Term
    proof: Term
    span: Span | None = field(default=None, compare=False)


Declaration = Union[ConstDecl, RuleDecl, ThmDecl]


@dataclass
class SourceFile:
    declarations: list[Declaration]
    path: str | None = None

    def __iter__(self):
        return iter(self.declarations)

    def __len__(self) -> int:
        return len(self.declarations)

    def declared_names(self) -> list[str]:
        return [d.name for d in self.declarations if not isinstance(d, RuleDecl)]


# -- lexer ------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "op", "eof"
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, self.line, self.col + max(len(self.text), 1))


_TOKEN_RE = re.compile(r"-->|->|=>|:=|[:.,\[\]()]|[A-Za-z0-9_]+")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k):
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(1)
            continue
        if text.startswith("(;", i):
            start = (line, col)
            depth = 0
            while True:
                if i >= n:
                    raise ParseError("unterminated comment", *start)
                if text.startswith("(;", i):
                    depth += 1
                    advance(2)
                elif text.startswith(";)", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        tok = m.group(0)
        kind = "id" if tok[0].isalnum() or tok[0] == "_" else "op"
        tokens.append(Token(kind, tok, line, col))
        advance(len(tok))
    tokens.append(Token("eof", "", line, col))
    return tokens


# -- parser -------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, known: Iterable[str]):
        self.toks = tokenize(text)
        self.pos = 0
        self.globals: set[str] = set(known)
        self.bound: list[str] = []
        self.rule_vars: set[str] = set()
        self.seen_rule_vars: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        tok = self.tok
        if tok.text != text or tok.kind == "eof":
            found = tok.text or "end of input"
            raise self.error(f"expected '{text}', found '{found}'")
        self.pos += 1
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "id" or tok.text in KEYWORDS:
            found = tok.text or "end of input"
            raise self.error(f"expected an identifier, found '{found}'")
        self.pos += 1
        return tok

    # declarations

    def file(self) -> list[Declaration]:
        out = []
        while self.tok.kind != "eof":
            out.append(self.decl())
        return out

    def decl(self) -> Declaration:
        start = self.tok
        if start.text == "[":
            return self.rule_decl()
        if start.text == "thm":
            self.pos += 1
            name_tok = self.ident()
            self.check_fresh(name_tok)
            self.expect(":")
            stmt = self.term()
            self.expect(":=")
            proof = self.term()
            end = self.expect(".")
            self.globals.add(name_tok.text)
            return ThmDecl(name_tok.text, stmt, proof, self.span(start, end))
        definable = False
        if start.text == "def":
            definable = True
            self.pos += 1
        name_tok = self.ident()
        self.check_fresh(name_tok)
        self.expect(":")
        ty = self.term()
        end = self.expect(".")
        self.globals.add(name_tok.text)
        return ConstDecl(name_tok.text, ty, definable, self.span(start, end))

    def check_fresh(self, tok: Token):
        if tok.text in self.globals:
            raise self.error(
                f"'{tok.text}' is already declared", tok, DuplicateDeclaration
            )

    def rule_decl(self) -> RuleDecl:
        start = self.expect("[")
        names: list[Token] = []
        if self.tok.text != "]":
            names.append(self.ident())
            while self.tok.text == ",":
                self.pos += 1
                names.append(self.ident())
        self.expect("]")
        seen = set()
        for t in names:
            if t.text in seen:
                raise self.error(
                    f"rule variable '{t.text}' listed twice", t, RuleVariableError
                )
            seen.add(t.text)
        self.rule_vars = seen
        try:
            lhs_tok = self.tok
            lhs = self.term()
            self.expect("-->")
            rhs_tok = self.tok
            rhs = self.term()
            end = self.expect(".")
        finally:
            self.rule_vars = set()
        lhs_vars = free_vars(lhs)
        for t in names:
            if t.text not in lhs_vars:
                raise self.error(
                    f"rule variable '{t.text}' does not occur in the left-hand side",
                    t,
                    RuleVariableError,
                )
        extra = free_vars(rhs) - lhs_vars
        if extra:
            raise self.error(
                f"right-hand side uses variables absent from the left-hand side: "
                f"{', '.join(sorted(extra))}",
                rhs_tok,
                RuleVariableError,
            )
        del lhs_tok
        return RuleDecl(tuple(t.text for t in names), lhs, rhs, self.span(start, end))

    @staticmethod
    def span(start: Token, end: Token) -> Span:
        return Span(start.line, start.col, end.line, end.col + 1)

    # terms

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "id" and tok.text not in KEYWORDS and self.peek().text == ":":
            self.pos += 2
            domain = self.app()
            op = self.tok
            if op.text not in ("=>", "->"):
                found = op.text or "end of input"
                raise self.error(f"expected '=>' or '->' after binder, found '{found}'")
            self.pos += 1
            self.bound.append(tok.text)
            try:
                body = self.term()
            finally:
                self.bound.pop()
            cls = Lam if op.text == "=>" else Pi
            return cls(domain, body, tok.text)
        if tok.kind == "id" and tok.text not in KEYWORDS and self.peek().text == "=>":
            raise self.error(f"binder '{tok.text}' needs a type annotation")
        left = self.app()
        if self.tok.text == "->":
            self.pos += 1
            self.bound.append("_")
            try:
                right = self.term()
            finally:
                self.bound.pop()
            return Pi(left, right, "_")
        return left

    def app(self) -> Term:
        t = self.atom()
        while self.tok.kind == "id" or self.tok.text == "(":
            if self.tok.kind == "id" and self.peek().text in (":",):
                break
            t = App(t, self.atom())
        return t

    def atom(self) -> Term:
        tok = self.tok
        if tok.text == "(":
            self.pos += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "id":
            if tok.text == "Type":
                self.pos += 1
                return TYPE
            if tok.text == "Kind":
                self.pos += 1
                return KIND
            if tok.text in KEYWORDS:
                raise self.error(f"unexpected keyword '{tok.text}'")
            self.pos += 1
            return self.resolve(tok)
        found = tok.text or "end of input"
        raise self.error(f"expected a term, found '{found}'")

    def resolve(self, tok: Token) -> Term:
        name = tok.text
        for depth, b in enumerate(reversed(self.bound)):
            if b == name:
                return BVar(depth)
        if name in self.rule_vars:
            return FVar(name)
        if name in self.globals:
            return Const(name)
        raise self.error(f"unbound identifier '{name}'", tok, UnboundIdentifier)


def parse(text: str | bytes, known: Iterable[str] = (), path: str | None = None) -> SourceFile:
    """Parse a whole file.  ``known`` lists constants declared beforehand."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return SourceFile(_Parser(text, known).file(), path)


def parse_term(
    text: str,
    known: Iterable[str] = (),
    variables: Iterable[str] = (),
) -> Term:
    """Parse a single term; ``variables`` are resolved as free variables."""
    p = _Parser(text, known)
    p.rule_vars = set(variables)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected '{p.tok.text}' after term")
    return t


# -- printer ---------------------------------------------------------------------

_TOP, _APP, _ATOM = 0, 1, 2


def _names_in_scope(t: Term, env: list[str]) -> set[str]:
    """Printed names that ``t`` refers to: constants, free and outer variables."""
    out: set[str] = set()

    def go(t: Term, depth: int):
        match t:
            case Const(n) | FVar(n):
                out.add(n)
            case BVar(i):
                if i >= depth:
                    j = i - depth
                    if j < len(env):
                        out.add(env[-1 - j])
            case App(f, a):
                go(f, depth)
                go(a, depth)
            case Pi(d, b) | Lam(d, b):
                go(d, depth)
                go(b, depth + 1)

    go(t, 0)
    return out


def _pick_name(hint: str, body: Term, env: list[str]) -> str:
    base = hint.split("%", 1)[0]
    if not base or base == "_" or not re.fullmatch(r"[A-Za-z0-9_]+", base):
        base = "x"
    if base in KEYWORDS:
        base = base + "_"
    avoid = _names_in_scope(body, env + [None]) - {None}
    if base not in avoid:
        return base
    k = 0
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def format_term(t: Term, env: list[str] | None = None, level: int = _TOP) -> str:
    env = list(env or [])
    return _fmt(t, env, level)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _fmt(t: Term, env: list[str], level: int) -> str:
    match t:
        case Sort(kind):
            return "Kind" if kind else "Type"
        case Const(n) | FVar(n):
            return n
        case BVar(i):
            if i < len(env):
                return env[-1 - i]
            return f"#{i}"
        case Pi(d, b, n):
            dom = _fmt(d, env, _APP)
            if references_bvar(b, 0):
                x = _pick_name(n, b, env)
                env.append(x)
                body = _fmt(b, env, _TOP)
                env.pop()
                return _paren(f"{x} : {dom} -> {body}", level > _TOP)
            env.append("_")
            body = _fmt(b, env, _TOP)
            env.pop()
            return _paren(f"{dom} -> {body}", level > _TOP)
        case Lam(d, b, n):
            dom = _fmt(d, env, _APP)
            x = _pick_name(n, b, env)
            env.append(x)
            body = _fmt(b, env, _TOP)
            env.pop()
            return _paren(f"{x} : {dom} => {body}", level > _TOP)
        case App(f, a):
            s = f"{_fmt(f, env, _APP)} {_fmt(a, env, _ATOM)}"
            return _paren(s, level > _APP)
    raise TypeError(f"not a term: {t!r}")


def format_decl(d: Declaration) -> str:
    match d:
        case ConstDecl(name, ty, definable):
            prefix = "def " if definable else ""
            return f"{prefix}{name} : {format_term(ty)}."
        case RuleDecl(vs, lhs, rhs):
            return f"[{', '.join(vs)}] {format_term(lhs)} --> {format_term(rhs)}."
        case ThmDecl(name, stmt, proof):
            return f"thm {name} : {format_term(stmt)} := {format_term(proof)}."
    raise TypeError(f"not a declaration: {d!r}")


def print_file(file: SourceFile | Iterable[Declaration]) -> str:
    decls = file.declarations if isinstance(file, SourceFile) else list(file)
    return "".join(format_decl(d) + "\n" for d in decls)


def print_bytes(file: SourceFile | Iterable[Declaration]) -> bytes:
    return print_file(file).encode("utf-8")
