"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MonocircError(Exception):
    """Base class for all errors raised by this package."""


class ExpansionOverflow(MonocircError):
    """A size guard (terms, degree, prefix length, table size) was exceeded."""

    def __init__(self, message: str, gate: int | None = None):
        super().__init__(message if gate is None else f"{message} (gate {gate})")
        self.gate = gate


class OracleTooLarge(MonocircError):
    pass


class SearchTooLarge(MonocircError):
    pass


class DivisionByZero(MonocircError, ZeroDivisionError):
    pass


class ShapeError(MonocircError, ValueError):
    pass


class MissingAssignment(MonocircError, KeyError):
    def __str__(self) -> str:
        return f"no value assigned to variable {self.args[0]!r}"


class PreconditionViolation(MonocircError, ValueError):
    pass


class InvariantBreach(MonocircError, AssertionError):
    """A proven property failed to hold; this indicates a bug, not bad input."""


class ParseError(MonocircError, ValueError):
    """Malformed input. ``where`` locates the problem (JSON path or line:col)."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
