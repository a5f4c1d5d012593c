"""Exception types shared across the package."""

from __future__ import annotations


class RelSearchError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(RelSearchError):
    """Malformed input file (bad range expression, wrong column count, ...)."""

    def __init__(self, message: str, *, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"col {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class AlignmentError(RelSearchError):
    """Relation references tokens or documents missing from the token layer."""


class IntegrityError(RelSearchError):
    """Internal consistency violation (unknown document, broken invariant)."""


class QueryParseError(RelSearchError):
    """Query string could not be parsed."""

    def __init__(self, message: str, *, position: int | None = None,
                 segment: int | None = None):
        self.position = position
        self.segment = segment
        super().__init__(message)


class FilterValidationError(RelSearchError):
    """Filter references a value absent from the dataset inventories."""

    def __init__(self, message: str, *, allowed: list[str] | None = None):
        self.allowed = allowed or []
        super().__init__(message)


class VariableError(RelSearchError):
    """Unknown or unusable breakdown variable."""

    def __init__(self, message: str, *, allowed: list[str] | None = None):
        self.allowed = allowed or []
        super().__init__(message)
