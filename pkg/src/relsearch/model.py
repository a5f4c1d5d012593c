"""Core domain types: tokens, spans, signals, relations and datasets.

The searchable unit is the discourse relation: two possibly discontinuous
argument spans aligned to token positions, same-sentence context spans
(before, between and after the arguments), a label pair, a direction and
an optional list of typed signal tokens. All types are immutable after
construction and safe for concurrent reads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import IntegrityError


@dataclass(frozen=True, slots=True)
class TokenRecord:
    """One corpus token with its document coordinates and UD annotations."""

    doc_id: str
    sent_index: int
    tok_index_doc: int
    form: str
    lemma: str
    upos: str
    deprel: str


@dataclass(frozen=True, slots=True)
class Span:
    """Ordered, non-overlapping, inclusive (start, end) token-index ranges.

    Indices are document-global and 0-based. A span may be empty or
    discontinuous. Construction normalizes: ranges are sorted and
    contiguous/adjacent ranges are merged; overlaps raise.
    """

    ranges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        normalized = normalize_ranges(self.ranges)
        object.__setattr__(self, "ranges", normalized)

    @classmethod
    def from_indices(cls, indices) -> Span:
        """Build a span from an iterable of token indices."""
        idx = sorted(set(indices))
        if not idx:
            return cls(())
        ranges = []
        start = prev = idx[0]
        for i in idx[1:]:
            if i == prev + 1:
                prev = i
            else:
                ranges.append((start, prev))
                start = prev = i
        ranges.append((start, prev))
        return cls(tuple(ranges))

    def is_empty(self) -> bool:
        return not self.ranges

    def __len__(self) -> int:
        return sum(b - a + 1 for a, b in self.ranges)

    def __contains__(self, index: int) -> bool:
        return any(a <= index <= b for a, b in self.ranges)

    def indices(self):
        """Yield every token index in ascending order."""
        for a, b in self.ranges:
            yield from range(a, b + 1)

    def first(self) -> int:
        if not self.ranges:
            raise IntegrityError("first() on empty span")
        return self.ranges[0][0]

    def last(self) -> int:
        if not self.ranges:
            raise IntegrityError("last() on empty span")
        return self.ranges[-1][1]

    def union(self, other: Span) -> Span:
        return Span.from_indices(list(self.indices()) + list(other.indices()))

    def overlaps(self, other: Span) -> bool:
        mine = set(self.indices())
        return any(i in mine for i in other.indices())


def normalize_ranges(ranges) -> tuple[tuple[int, int], ...]:
    """Sort ranges, merge touching ones, reject reversed or overlapping."""
    items = sorted(tuple(r) for r in ranges)
    for a, b in items:
        if b < a:
            raise IntegrityError(f"reversed range ({a}, {b})")
    merged: list[list[int]] = []
    for a, b in items:
        if merged and a <= merged[-1][1]:
            raise IntegrityError(f"overlapping ranges at index {a}")
        if merged and a == merged[-1][1] + 1:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True, slots=True)
class Signal:
    """A typed, optionally subtyped cue anchored to document token positions."""

    sig_type: str
    sig_subtype: str | None
    token_positions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "token_positions",
                           tuple(sorted(self.token_positions)))


class Direction(enum.Enum):
    """Arrow between the text-order arguments: which one is the source."""

    ONE_TO_TWO = "1>2"
    TWO_TO_ONE = "1<2"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_label(cls, label: str) -> Direction:
        for member in cls:
            if member.value == label:
                return member
        raise IntegrityError(f"unknown direction {label!r}")


@dataclass(frozen=True, slots=True)
class Relation:
    """One discourse-relation instance, the unit of search.

    arg1/arg2 are fixed by text order (arg1 starts first); source/target
    are the direction-bearing view of the same two spans.
    """

    rel_id: str
    doc_id: str
    arg1: Span
    arg2: Span
    pre_ctx: Span
    inter_ctx: Span
    post_ctx: Span
    direction: Direction
    disrpt_label: str
    orig_label: str
    signals: tuple[Signal, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)

    def source(self) -> Span:
        return self.arg1 if self.direction is Direction.ONE_TO_TWO else self.arg2

    def target(self) -> Span:
        return self.arg2 if self.direction is Direction.ONE_TO_TWO else self.arg1

    def window(self) -> Span:
        """Union of the five spans: the full sentence context of the relation."""
        indices = list(self.arg1.indices()) + list(self.arg2.indices())
        for ctx in (self.pre_ctx, self.inter_ctx, self.post_ctx):
            indices.extend(ctx.indices())
        return Span.from_indices(indices)


@dataclass(eq=False)
class Dataset:
    """An immutable loaded corpus: token arrays, relations and inventories.

    Instances hash by identity so derived structures (search indexes) can
    be cached per dataset.
    """

    dataset_id: str
    doc_ids: list[str]
    tokens: dict[str, list[TokenRecord]]
    sent_spans: dict[str, list[tuple[int, int]]]
    relations: list[Relation]
    disrpt_labels: list[str]
    orig_labels: list[str]
    signal_types: list[str]
    signal_subtypes: list[str]
    metadata_keys: list[str]
    upos_vocab: frozenset[str]
    deprel_vocab: frozenset[str]
    has_signals: bool = False
    display_meta: dict[str, str] = field(default_factory=dict)

    @property
    def doc_lengths(self) -> dict[str, int]:
        return {doc: len(toks) for doc, toks in self.tokens.items()}

    @property
    def token_count(self) -> int:
        return sum(len(toks) for toks in self.tokens.values())

    @property
    def sentence_count(self) -> int:
        return sum(len(spans) for spans in self.sent_spans.values())

    def token_at(self, doc_id: str, index: int) -> TokenRecord:
        return self.tokens[doc_id][index]


def sentence_window(ds: Dataset, doc_id: str, arg_indices) -> Span:
    """Union of the complete sentences containing any of the given indices.

    Sentences holding no argument token are excluded, so the window may be
    discontinuous when the arguments sit in non-adjacent sentences.
    """
    if doc_id not in ds.tokens:
        raise IntegrityError(f"unknown document {doc_id!r} in {ds.dataset_id}")
    doc = ds.tokens[doc_id]
    spans = ds.sent_spans[doc_id]
    sent_ids = set()
    for i in arg_indices:
        if not 0 <= i < len(doc):
            raise IntegrityError(f"token index {i} out of bounds for {doc_id}")
        sent_ids.add(doc[i].sent_index)
    return Span(tuple(spans[s] for s in sorted(sent_ids)))


def relation_sentence_window(rel: Relation, ds: Dataset) -> Span:
    """Full sentence context of a relation: every sentence touching an argument."""
    args = list(rel.arg1.indices()) + list(rel.arg2.indices())
    return sentence_window(ds, rel.doc_id, args)
