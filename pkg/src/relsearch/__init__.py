"""In-memory search and statistics over discourse relation corpora."""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    FilterValidationError,
    FormatError,
    IntegrityError,
    QueryParseError,
    RelSearchError,
)
from .model import Dataset, Direction, Relation, Signal, Span, TokenRecord

__all__ = [
    "AlignmentError",
    "Dataset",
    "Direction",
    "FilterValidationError",
    "FormatError",
    "IntegrityError",
    "QueryParseError",
    "Relation",
    "RelSearchError",
    "Signal",
    "Span",
    "TokenRecord",
    "__version__",
]
