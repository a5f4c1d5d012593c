"""The relation query language: tokenizer, pattern resolution, parser.

A query is whitespace-tokenized. At most one operator token may appear:

    ``||``    left side must match inside arg1, right side inside arg2
    ``-||>``  left side must match inside the source unit, right side
              inside the target unit (either side may be empty)

Every other token is a token pattern of up to four ``|``-separated
segments. With exactly four segments the reading is positional
(form|lemma|upos|deprel, empty segment = no constraint). With fewer,
segment 0 is the form and each later non-empty segment is classified
against the dataset's closed vocabularies: UPOS first, then dependency
relation, else it is read as a lemma. A value belonging to both
vocabularies is refused as ambiguous rather than silently resolved;
the four-segment form disambiguates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import QueryParseError


class Op(enum.Enum):
    """Query operators, named by what they pin each side to."""

    ARG_ORDER = "||"
    SOURCE_TARGET = "-||>"


OPERATOR_TOKENS = {op.value: op for op in Op}


@dataclass(frozen=True, slots=True)
class TokenPattern:
    """Constraints for one query token; None = unconstrained.

    At least one field is always set (enforced at resolution). Form and
    lemma are kept as written; case handling is the matcher's concern.
    """

    form: str | None = None
    lemma: str | None = None
    upos: str | None = None
    deprel: str | None = None


@dataclass(frozen=True, slots=True)
class QueryAst:
    left_patterns: tuple[TokenPattern, ...] = ()
    op: Op | None = None
    right_patterns: tuple[TokenPattern, ...] = ()

    @property
    def patterns(self) -> tuple[TokenPattern, ...]:
        return self.left_patterns + self.right_patterns

    def is_empty(self) -> bool:
        return not self.left_patterns and not self.right_patterns


@dataclass(frozen=True, slots=True)
class ValueFilter:
    value: str
    negated: bool = False


@dataclass(frozen=True, slots=True)
class LabelFilter:
    value: str
    negated: bool = False
    which: str = "disrpt"  # "disrpt" or "orig"


@dataclass(frozen=True, slots=True)
class QuerySpec:
    """A full search request: parsed query, match mode, and filters."""

    ast: QueryAst = QueryAst()
    exact: bool = False
    dataset_id: str = ""
    label_filter: LabelFilter | None = None
    direction_filter: ValueFilter | None = None
    signal_type_filter: ValueFilter | None = None
    signal_subtype_filter: ValueFilter | None = None
    any_signal_filter: bool | None = None
    include_context: bool = False
    case_sensitive: bool = False
    query_text: str = ""


def tokenize(query: str) -> list:
    """Whitespace-split into raw pattern segments and operator markers."""
    return [OPERATOR_TOKENS.get(tok, tok) for tok in query.split()]


def resolve_pattern(segment: str, upos_vocab: frozenset[str],
                    deprel_vocab: frozenset[str], *,
                    position: int | None = None) -> TokenPattern:
    """Classify a raw pattern segment against the closed vocabularies."""
    segs = segment.split("|")
    if len(segs) > 4:
        raise QueryParseError(
            f"pattern {segment!r} has more than four segments",
            position=position)
    if not any(segs):
        raise QueryParseError(f"pattern {segment!r} has no constraints",
                              position=position)
    if len(segs) == 4:
        form, lemma, upos, deprel = (s if s else None for s in segs)
        return TokenPattern(form=form, lemma=lemma, upos=upos, deprel=deprel)

    form = segs[0] or None
    lemma = upos = deprel = None
    # Subtyped relations like advcl:relcl make their bare prefix a valid
    # deprel constraint, so bases count as vocabulary members here.
    deprel_bases = {d.partition(":")[0] for d in deprel_vocab}
    for seg_index, seg in enumerate(segs[1:], start=1):
        if not seg:
            continue
        is_upos = seg in upos_vocab
        is_deprel = seg in deprel_vocab or seg in deprel_bases
        if is_upos and is_deprel:
            raise QueryParseError(
                f"{seg!r} is both a UPOS tag and a dependency relation here; "
                f"use the four-segment form to disambiguate",
                position=position, segment=seg_index)
        if is_upos:
            if upos is not None:
                raise QueryParseError(
                    f"pattern sets UPOS twice ({upos!r}, {seg!r})",
                    position=position, segment=seg_index)
            upos = seg
        elif is_deprel:
            if deprel is not None:
                raise QueryParseError(
                    f"pattern sets the dependency relation twice "
                    f"({deprel!r}, {seg!r})",
                    position=position, segment=seg_index)
            deprel = seg
        else:
            if lemma is not None:
                raise QueryParseError(
                    f"pattern sets the lemma twice ({lemma!r}, {seg!r})",
                    position=position, segment=seg_index)
            lemma = seg
    return TokenPattern(form=form, lemma=lemma, upos=upos, deprel=deprel)


def parse(query: str, upos_vocab: frozenset[str],
          deprel_vocab: frozenset[str]) -> QueryAst:
    """Parse query text; empty text parses to the all-matching AST."""
    op: Op | None = None
    left: list[TokenPattern] = []
    right: list[TokenPattern] = []
    side = left
    for position, tok in enumerate(tokenize(query)):
        if isinstance(tok, Op):
            if op is not None:
                raise QueryParseError(
                    f"more than one operator in query ({tok.value!r})",
                    position=position)
            op = tok
            side = right
            continue
        side.append(resolve_pattern(tok, upos_vocab, deprel_vocab,
                                    position=position))
    if op is Op.ARG_ORDER and (not left or not right):
        raise QueryParseError("'||' needs a pattern on each side")
    return QueryAst(tuple(left), op, tuple(right))


def render(ast: QueryAst) -> str:
    """Canonical query text; parsing it again gives back the same AST."""
    def render_pattern(p: TokenPattern) -> str:
        if p.lemma is None and p.upos is None and p.deprel is None:
            return p.form
        return "|".join([p.form or "", p.lemma or "", p.upos or "",
                         p.deprel or ""])

    parts = [render_pattern(p) for p in ast.left_patterns]
    if ast.op is not None:
        parts.append(ast.op.value)
        parts.extend(render_pattern(p) for p in ast.right_patterns)
    return " ".join(parts)
