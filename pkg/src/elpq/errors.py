"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes:
ParseError -> 1, SemanticError -> 2, BudgetExceeded -> 3.
"""

from __future__ import annotations


class ElpqError(Exception):
    """Base class for all library errors."""


class ParseError(ElpqError):
    def __init__(self, message: str, span=None):
        self.span = span
        if span is not None:
            message = f"{message} (line {span.line}, column {span.column})"
        super().__init__(message)


class ElpSyntaxError(ParseError):
    pass


class ArityMismatchError(ParseError):
    pass


class ClassicalNegationOutsideEpistemicError(ParseError):
    pass


class SemanticError(ElpqError):
    pass


class ReservedNameError(SemanticError):
    pass


class NonGroundError(SemanticError):
    pass


class EpistemicPresent(SemanticError):
    pass


class WrongFragment(SemanticError):
    pass


class EmptyCollection(SemanticError):
    pass


class UncoveredRule(SemanticError):
    pass


class VariableOverlap(SemanticError):
    pass


class ClauseWidthExceeded(SemanticError):
    pass


class InvalidInstance(SemanticError):
    pass


class ConstraintViolated(ElpqError):
    """A constraint fired during least-model computation."""


class BudgetExceeded(ElpqError):
    def __init__(self, what: str, needed, cap):
        self.what = what
        self.needed = needed
        self.cap = cap
        super().__init__(f"{what} budget exceeded: need {needed}, cap is {cap}")


class InvalidDecomposition(SemanticError):
    pass
