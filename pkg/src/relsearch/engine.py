"""Query evaluation: per-dataset inverted indexes, filters, matching.

Token postings are kept in global coordinates (dataset-wide ids obtained
by offsetting each document), so a posting list maps straight to the
relations whose argument tokens cover it. Evaluation narrows candidates
through the rarest constrained pattern before verifying each relation,
which is what keeps counting fast on corpora in the hundreds of
thousands of tokens without a dedicated index server.
"""

from __future__ import annotations

import weakref
from bisect import bisect_right
from dataclasses import dataclass, field

from .deql import Op, QuerySpec, TokenPattern
from .errors import FilterValidationError
from .model import Dataset, Relation, Signal, TokenRecord


def deprel_matches(pattern: str, deprel: str) -> bool:
    """Exact match, or pattern equals the relation's prefix before ':'."""
    return pattern == deprel or deprel.partition(":")[0] == pattern


def match_pattern(tok: TokenRecord, pat: TokenPattern,
                  case_sensitive: bool = False) -> bool:
    """Conjunction over the pattern's present fields."""
    if pat.form is not None:
        if case_sensitive:
            if tok.form != pat.form:
                return False
        elif tok.form.casefold() != pat.form.casefold():
            return False
    if pat.lemma is not None:
        if case_sensitive:
            if tok.lemma != pat.lemma:
                return False
        elif tok.lemma.casefold() != pat.lemma.casefold():
            return False
    if pat.upos is not None and tok.upos != pat.upos:
        return False
    if pat.deprel is not None and not deprel_matches(pat.deprel, tok.deprel):
        return False
    return True


@dataclass(slots=True)
class Match:
    """One matching relation with the token positions the patterns hit."""

    rel_index: int
    relation: Relation
    left_positions: tuple[int, ...] = ()
    right_positions: tuple[int, ...] = ()

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(sorted(self.left_positions + self.right_positions))


# ---------------------------------------------------------------------------
# Index


@dataclass
class SearchIndex:
    dataset: Dataset
    doc_offset: dict[str, int] = field(default_factory=dict)
    doc_starts: list[int] = field(default_factory=list)
    form_postings: dict[str, list[int]] = field(default_factory=dict)
    lemma_postings: dict[str, list[int]] = field(default_factory=dict)
    upos_postings: dict[str, list[int]] = field(default_factory=dict)
    deprel_postings: dict[str, list[int]] = field(default_factory=dict)
    pos_to_rels: dict[int, list[int]] = field(default_factory=dict)
    label_to_rels: dict[str, frozenset[int]] = field(default_factory=dict)
    orig_to_rels: dict[str, frozenset[int]] = field(default_factory=dict)
    dir_to_rels: dict[str, frozenset[int]] = field(default_factory=dict)
    sigtype_to_rels: dict[str, frozenset[int]] = field(default_factory=dict)
    sigsub_to_rels: dict[str, frozenset[int]] = field(default_factory=dict)
    signalled_rels: frozenset[int] = frozenset()
    all_rels: frozenset[int] = frozenset()
    _window_pos_to_rels: dict[int, list[int]] | None = None

    def global_id(self, doc_id: str, tok_index: int) -> int:
        return self.doc_offset[doc_id] + tok_index

    def locate(self, global_id: int) -> tuple[str, int]:
        """Global id back to (doc_id, doc-local index)."""
        doc_pos = bisect_right(self.doc_starts, global_id) - 1
        doc_id = self.dataset.doc_ids[doc_pos]
        return doc_id, global_id - self.doc_starts[doc_pos]

    def window_pos_to_rels(self) -> dict[int, list[int]]:
        """Window-token mapping, built on first context-inclusive query."""
        if self._window_pos_to_rels is None:
            mapping: dict[int, list[int]] = {}
            for ri, rel in enumerate(self.dataset.relations):
                off = self.doc_offset[rel.doc_id]
                for i in rel.window().indices():
                    mapping.setdefault(off + i, []).append(ri)
            self._window_pos_to_rels = mapping
        return self._window_pos_to_rels


def build_index(ds: Dataset) -> SearchIndex:
    idx = SearchIndex(dataset=ds)
    offset = 0
    for doc_id in ds.doc_ids:
        idx.doc_offset[doc_id] = offset
        idx.doc_starts.append(offset)
        offset += len(ds.tokens[doc_id])

    for doc_id in ds.doc_ids:
        off = idx.doc_offset[doc_id]
        for tok in ds.tokens[doc_id]:
            gid = off + tok.tok_index_doc
            idx.form_postings.setdefault(tok.form.casefold(), []).append(gid)
            idx.lemma_postings.setdefault(tok.lemma.casefold(), []).append(gid)
            idx.upos_postings.setdefault(tok.upos, []).append(gid)
            idx.deprel_postings.setdefault(tok.deprel, []).append(gid)

    label: dict[str, set[int]] = {}
    orig: dict[str, set[int]] = {}
    direction: dict[str, set[int]] = {}
    sigt: dict[str, set[int]] = {}
    sigs: dict[str, set[int]] = {}
    signalled: set[int] = set()
    for ri, rel in enumerate(ds.relations):
        off = idx.doc_offset[rel.doc_id]
        for i in rel.arg1.indices():
            idx.pos_to_rels.setdefault(off + i, []).append(ri)
        for i in rel.arg2.indices():
            idx.pos_to_rels.setdefault(off + i, []).append(ri)
        label.setdefault(rel.disrpt_label.casefold(), set()).add(ri)
        orig.setdefault(rel.orig_label.casefold(), set()).add(ri)
        direction.setdefault(rel.direction.label, set()).add(ri)
        if rel.signals:
            signalled.add(ri)
        for sig in rel.signals:
            sigt.setdefault(sig.sig_type.casefold(), set()).add(ri)
            if sig.sig_subtype:
                sigs.setdefault(sig.sig_subtype.casefold(), set()).add(ri)

    idx.label_to_rels = {k: frozenset(v) for k, v in label.items()}
    idx.orig_to_rels = {k: frozenset(v) for k, v in orig.items()}
    idx.dir_to_rels = {k: frozenset(v) for k, v in direction.items()}
    idx.sigtype_to_rels = {k: frozenset(v) for k, v in sigt.items()}
    idx.sigsub_to_rels = {k: frozenset(v) for k, v in sigs.items()}
    idx.signalled_rels = frozenset(signalled)
    idx.all_rels = frozenset(range(len(ds.relations)))
    return idx


_INDEX_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def get_index(ds: Dataset) -> SearchIndex:
    idx = _INDEX_CACHE.get(ds)
    if idx is None:
        idx = build_index(ds)
        _INDEX_CACHE[ds] = idx
    return idx


# ---------------------------------------------------------------------------
# Filters


def _restrict(base: frozenset[int], rels: frozenset[int],
              negated: bool) -> frozenset[int]:
    return base - rels if negated else base & rels


def filter_rels(spec: QuerySpec, ds: Dataset, *,
                lenient: bool = False) -> frozenset[int]:
    """Relation indices passing the spec's filters.

    Filter values are validated against the dataset inventories; in
    lenient mode a value missing here (but presumably valid elsewhere,
    as in cross-dataset comparison) selects nothing instead of erroring.
    """
    idx = get_index(ds)
    base = idx.all_rels

    flt = spec.label_filter
    if flt is not None:
        if flt.which == "orig":
            table, allowed = idx.orig_to_rels, ds.orig_labels
        else:
            table, allowed = idx.label_to_rels, ds.disrpt_labels
        key = flt.value.casefold()
        if key not in table and not lenient:
            raise FilterValidationError(
                f"unknown label {flt.value!r}", allowed=list(allowed))
        base = _restrict(base, table.get(key, frozenset()), flt.negated)

    flt = spec.direction_filter
    if flt is not None:
        if flt.value not in ("1>2", "1<2"):
            raise FilterValidationError(
                f"bad direction {flt.value!r}", allowed=["1>2", "1<2"])
        base = _restrict(base, idx.dir_to_rels.get(flt.value, frozenset()),
                         flt.negated)

    flt = spec.signal_type_filter
    if flt is not None:
        key = flt.value.casefold()
        if key not in idx.sigtype_to_rels and not lenient:
            raise FilterValidationError(
                f"unknown signal type {flt.value!r}",
                allowed=list(ds.signal_types))
        base = _restrict(base, idx.sigtype_to_rels.get(key, frozenset()),
                         flt.negated)

    flt = spec.signal_subtype_filter
    if flt is not None:
        key = flt.value.casefold()
        if key not in idx.sigsub_to_rels and not lenient:
            raise FilterValidationError(
                f"unknown signal subtype {flt.value!r}",
                allowed=list(ds.signal_subtypes))
        base = _restrict(base, idx.sigsub_to_rels.get(key, frozenset()),
                         flt.negated)

    if spec.any_signal_filter is not None:
        base = _restrict(base, idx.signalled_rels,
                         not spec.any_signal_filter)

    return base


# ---------------------------------------------------------------------------
# Matching


def match_side(patterns, ranges, exact: bool, ds: Dataset, doc_id: str,
               case_sensitive: bool = False) -> tuple | None:
    """Positions where a side's patterns hit inside the scope, or None.

    Scope arrives as (start, end) ranges; keeping them separate is what
    stops exact runs from bridging two arguments that happen to be
    adjacent in the text. An empty side matches vacuously.
    """
    if not patterns:
        return ()
    if not ranges:
        return None
    toks = ds.tokens[doc_id]
    n = len(patterns)
    if exact:
        for a, b in ranges:
            for start in range(a, b - n + 2):
                if all(match_pattern(toks[start + j], patterns[j],
                                     case_sensitive) for j in range(n)):
                    return tuple(range(start, start + n))
        return None
    # Flexible mode: leftmost order-respecting assignment. Greedy is
    # correct here, as for any subsequence search.
    out = []
    pi = 0
    for a, b in ranges:
        for i in range(a, b + 1):
            if match_pattern(toks[i], patterns[pi], case_sensitive):
                out.append(i)
                pi += 1
                if pi == n:
                    return tuple(out)
    return None


def _scopes(rel: Relation, op: Op | None,
            include_context: bool) -> tuple[tuple, tuple]:
    """Scope ranges for (left, right) under the operator semantics."""
    if op is Op.ARG_ORDER:
        return rel.arg1.ranges, rel.arg2.ranges
    if op is Op.SOURCE_TARGET:
        return rel.source().ranges, rel.target().ranges
    if include_context:
        return rel.window().ranges, ()
    # No operator: both arguments as one scope in text order, ranges kept
    # separate so exact runs stay inside a single argument.
    return tuple(sorted(rel.arg1.ranges + rel.arg2.ranges)), ()


def _posting_lists(idx: SearchIndex, p: TokenPattern) -> tuple | None:
    """(cost, lists) for the pattern's cheapest constrained dimension."""
    best = None
    if p.form is not None:
        lists = [idx.form_postings.get(p.form.casefold(), [])]
        best = (sum(map(len, lists)), lists)
    if p.lemma is not None:
        lists = [idx.lemma_postings.get(p.lemma.casefold(), [])]
        cand = (sum(map(len, lists)), lists)
        if best is None or cand[0] < best[0]:
            best = cand
    if p.upos is not None:
        lists = [idx.upos_postings.get(p.upos, [])]
        cand = (sum(map(len, lists)), lists)
        if best is None or cand[0] < best[0]:
            best = cand
    if p.deprel is not None:
        lists = [v for k, v in idx.deprel_postings.items()
                 if deprel_matches(p.deprel, k)]
        cand = (sum(map(len, lists)), lists)
        if best is None or cand[0] < best[0]:
            best = cand
    return best


def _candidates(idx: SearchIndex, spec: QuerySpec,
                base: frozenset[int]) -> list[int]:
    """Relations that can possibly match, in corpus order."""
    best = None
    for p in spec.ast.patterns:
        cand = _posting_lists(idx, p)
        if cand is None:
            continue
        if cand[0] == 0:
            return []
        if best is None or cand[0] < best[0]:
            best = cand
    if best is None:
        return sorted(base)
    mapping = (idx.window_pos_to_rels()
               if spec.include_context and spec.ast.op is None
               else idx.pos_to_rels)
    hit: set[int] = set()
    for lst in best[1]:
        for gid in lst:
            for ri in mapping.get(gid, ()):
                if ri in base:
                    hit.add(ri)
    return sorted(hit)


def _verify(spec: QuerySpec, ds: Dataset, rel: Relation) -> tuple | None:
    """(left_positions, right_positions) if the relation matches."""
    left_scope, right_scope = _scopes(rel, spec.ast.op, spec.include_context)
    left = match_side(spec.ast.left_patterns, left_scope, spec.exact,
                      ds, rel.doc_id, spec.case_sensitive)
    if left is None:
        return None
    right = match_side(spec.ast.right_patterns, right_scope, spec.exact,
                       ds, rel.doc_id, spec.case_sensitive)
    if right is None:
        return None
    return left, right


def evaluate(spec: QuerySpec, ds: Dataset, *,
             lenient: bool = False) -> list[Match]:
    """All matching relations in corpus order, with match positions."""
    idx = get_index(ds)
    base = filter_rels(spec, ds, lenient=lenient)
    if not base:
        return []
    if spec.ast.is_empty():
        return [Match(ri, ds.relations[ri]) for ri in sorted(base)]
    out: list[Match] = []
    for ri in _candidates(idx, spec, base):
        rel = ds.relations[ri]
        hit = _verify(spec, ds, rel)
        if hit is not None:
            out.append(Match(ri, rel, hit[0], hit[1]))
    return out


def count(spec: QuerySpec, ds: Dataset, *, lenient: bool = False) -> int:
    """len(evaluate(...)) without building match records."""
    idx = get_index(ds)
    base = filter_rels(spec, ds, lenient=lenient)
    if not base:
        return 0
    if spec.ast.is_empty():
        return len(base)
    return sum(1 for ri in _candidates(idx, spec, base)
               if _verify(spec, ds, ds.relations[ri]) is not None)


# ---------------------------------------------------------------------------
# Highlighting support


SPAN_ROLES = ("arg1", "arg2", "pre", "inter", "post")


def role_map(rel: Relation) -> dict[int, str]:
    """Token index -> span role over the relation's sentence window."""
    roles: dict[int, str] = {}
    for role, span in (("arg1", rel.arg1), ("arg2", rel.arg2),
                       ("pre", rel.pre_ctx), ("inter", rel.inter_ctx),
                       ("post", rel.post_ctx)):
        for i in span.indices():
            roles[i] = role
    return roles


def signal_map(rel: Relation) -> dict[int, Signal]:
    """Token index -> covering signal (first one wins on overlap)."""
    out: dict[int, Signal] = {}
    for sig in rel.signals:
        for pos in sig.token_positions:
            out.setdefault(pos, sig)
    return out
