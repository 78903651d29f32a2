"""Exception hierarchy shared by every solver module."""

from __future__ import annotations


class IndTransError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionViolated(IndTransError):
    pass


class InvalidGraph(PreconditionViolated):
    pass


class NotRegular(PreconditionViolated):
    pass


class BlocksizeTooSmall(PreconditionViolated):
    pass


class NegativeWeight(PreconditionViolated):
    pass


class AvoidSetTooLarge(PreconditionViolated):
    pass


class NotSameBlock(PreconditionViolated):
    pass


class Infeasible(IndTransError):
    pass


class Unbounded(IndTransError):
    pass


class BudgetExceeded(IndTransError):
    pass


class InternalInvariantViolated(IndTransError):
    """A runtime check of a proven property failed."""


class OracleContractViolated(InternalInvariantViolated):
    pass


class TooLarge(IndTransError):
    pass


class ParseError(IndTransError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SemanticError(IndTransError):
    pass
