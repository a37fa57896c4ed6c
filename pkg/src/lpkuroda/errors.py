"""Exception classes shared by the kernel, the reducer and the type checker."""

from __future__ import annotations


class KernelError(Exception):
    """Base class for every error raised while checking or reducing terms."""

    def __init__(self, message: str, span=None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.message}"
        return self.message


class BudgetExceeded(KernelError):
    """Reduction ran past its step budget (probably a non-terminating rule set)."""


class TypingError(KernelError):
    pass


class UnboundVariable(TypingError):
    pass


class UnboundConstant(TypingError):
    pass


class NotAProduct(TypingError):
    pass


class SortMismatch(TypingError):
    pass


class KindAsDomain(TypingError):
    pass


class Untypable(TypingError):
    pass


class TypeMismatch(TypingError):
    def __init__(self, message: str, expected=None, found=None, span=None):
        super().__init__(message, span)
        self.expected = expected
        self.found = found


class DuplicateName(TypingError):
    pass


class NotClosed(TypingError):
    pass


class RuleError(TypingError):
    """Ill-formed rewrite rule (bad variables, unsupported pattern shape)."""


class HeadNotDefinable(RuleError):
    pass


class ProofLevelRule(RuleError):
    pass


class InvalidTranslatedRule(RuleError):
    pass


class UnknownWitness(KernelError):
    pass


class ValidationError(KernelError):
    """The theory is not encoded in higher-order logic."""
