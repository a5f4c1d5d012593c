"""Ingestion of DISRPT-format corpora: .rels + .conllu + dataset manifests.

Token indices in .rels files are document-wide and 1-based; everything is
converted to 0-based document coordinates here. Relation rows are parsed
header-driven (case-insensitive), so column order variations across task
editions are tolerated. Signals ride in an optional extra `signals` column
(grammar: signals separated by `|`, each `type;subtype;positions` with
1-based comma-separated positions; empty cell or `_` means none).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

from .errors import AlignmentError, FormatError
from .model import (
    Dataset,
    Direction,
    Relation,
    Signal,
    Span,
    TokenRecord,
    sentence_window,
)

log = logging.getLogger(__name__)

# Columns with a fixed meaning in the .rels header; anything else is kept
# as per-relation metadata.
KNOWN_RELS_COLUMNS = {
    "doc", "unit1_toks", "unit2_toks", "unit1_txt", "unit2_txt",
    "s1_toks", "s2_toks", "unit1_sent", "unit2_sent",
    "dir", "orig_label", "label", "signals",
}
REQUIRED_RELS_COLUMNS = ("doc", "unit1_toks", "unit2_toks", "dir", "label")

DIRECTIONS = {"1>2", "1<2"}


# ---------------------------------------------------------------------------
# Range expressions


def parse_range_expr(expr: str, *, path: str | None = None,
                     line: int | None = None) -> Span:
    """Parse a 1-based range expression like "5-8,12" into a 0-based Span."""
    if not expr or not expr.strip():
        raise FormatError("empty range expression", path=path, line=line)
    items: list[tuple[int, int]] = []
    for col, item in enumerate(expr.split(",")):
        item = item.strip()
        a, sep, b = item.partition("-")
        try:
            start = int(a)
            end = int(b) if sep else start
        except ValueError:
            raise FormatError(f"malformed range item {item!r}",
                              path=path, line=line, column=col) from None
        if start < 1 or end < 1:
            raise FormatError(f"range item {item!r} is not 1-based",
                              path=path, line=line, column=col)
        if end < start:
            raise FormatError(f"reversed range {item!r}",
                              path=path, line=line, column=col)
        items.append((start - 1, end - 1))
    items.sort()
    for (_, prev_end), (next_start, _) in zip(items, items[1:]):
        if next_start <= prev_end:
            raise FormatError(f"overlapping ranges in {expr!r}",
                              path=path, line=line)
    return Span(tuple(items))


def format_range_expr(span: Span) -> str:
    """Render a Span back to the normalized 1-based range expression."""
    return ",".join(
        str(a + 1) if a == b else f"{a + 1}-{b + 1}"
        for a, b in span.ranges
    )


# ---------------------------------------------------------------------------
# Signal descriptors


def parse_signal_cell(cell: str, *, path: str | None = None,
                      line: int | None = None) -> tuple[Signal, ...]:
    """Parse one `signals` cell into Signal records (positions 0-based)."""
    cell = cell.strip()
    if not cell or cell == "_":
        return ()
    signals = []
    for descriptor in cell.split("|"):
        parts = descriptor.split(";")
        if len(parts) != 3:
            raise FormatError(
                f"signal descriptor {descriptor!r} is not type;subtype;positions",
                path=path, line=line)
        sig_type, subtype, positions = (p.strip() for p in parts)
        if not sig_type:
            raise FormatError(f"signal descriptor {descriptor!r} lacks a type",
                              path=path, line=line)
        try:
            toks = tuple(int(p) - 1 for p in positions.split(",") if p.strip())
        except ValueError:
            raise FormatError(
                f"bad token positions in signal {descriptor!r}",
                path=path, line=line) from None
        if any(t < 0 for t in toks):
            raise FormatError(f"signal positions must be 1-based in {descriptor!r}",
                              path=path, line=line)
        signals.append(Signal(sig_type, subtype or None, toks))
    return tuple(signals)


def format_signal_cell(signals) -> str:
    """Inverse of parse_signal_cell; `_` for no signals."""
    if not signals:
        return "_"
    return "|".join(
        ";".join([
            sig.sig_type,
            sig.sig_subtype or "",
            ",".join(str(p + 1) for p in sig.token_positions),
        ])
        for sig in signals
    )


# ---------------------------------------------------------------------------
# CoNLL-U


@dataclass
class ConlluCorpus:
    """Token layer of one dataset: per-document tokens, sentences, vocab."""

    doc_ids: list[str] = field(default_factory=list)
    tokens: dict[str, list[TokenRecord]] = field(default_factory=dict)
    sent_spans: dict[str, list[tuple[int, int]]] = field(default_factory=dict)
    upos_vocab: set[str] = field(default_factory=set)
    deprel_vocab: set[str] = field(default_factory=set)
    has_unnamed_doc: bool = False

    def rename_unnamed(self, doc_id: str) -> None:
        """Bind a headerless single-document file to its .rels doc name."""
        for attr in (self.tokens, self.sent_spans):
            attr[doc_id] = attr.pop(UNNAMED_DOC)
        self.doc_ids[self.doc_ids.index(UNNAMED_DOC)] = doc_id
        self.tokens[doc_id] = [
            TokenRecord(doc_id, t.sent_index, t.tok_index_doc,
                        t.form, t.lemma, t.upos, t.deprel)
            for t in self.tokens[doc_id]
        ]
        self.has_unnamed_doc = False


UNNAMED_DOC = ""


def parse_conllu(text: str, *, path: str | None = None) -> ConlluCorpus:
    """Parse CoNLL-U text into per-document token arrays.

    Documents are demarcated by `# newdoc id = X` comments; multiword-token
    lines (id "a-b") and empty nodes (id "a.b") are not indexed. Token
    indices count only ordinary token lines and are contiguous from 0 per
    document.
    """
    corpus = ConlluCorpus()
    doc_id: str | None = None
    tok_index = 0
    sent_index = 0
    sent_start: int | None = None

    def open_doc(name: str):
        nonlocal doc_id, tok_index, sent_index, sent_start
        close_sentence()
        doc_id = name
        tok_index = 0
        sent_index = 0
        corpus.doc_ids.append(name)
        corpus.tokens[name] = []
        corpus.sent_spans[name] = []

    def close_sentence():
        nonlocal sent_start, sent_index
        if sent_start is not None:
            corpus.sent_spans[doc_id].append((sent_start, tok_index - 1))
            sent_index += 1
            sent_start = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            close_sentence()
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("newdoc"):
                _, _, value = comment.partition("=")
                name = value.strip() if value.strip() else f"doc{len(corpus.doc_ids)}"
                open_doc(name)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise FormatError(f"expected 10 columns, got {len(cols)}",
                              path=path, line=lineno)
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue  # multiword-token ranges and empty nodes are not indexed
        if doc_id is None:
            open_doc(UNNAMED_DOC)
            corpus.has_unnamed_doc = True
        if sent_start is None:
            sent_start = tok_index
        form, lemma, upos, _xpos, _feats, _head, deprel = cols[1:8]
        corpus.tokens[doc_id].append(
            TokenRecord(doc_id, sent_index, tok_index, form, lemma, upos, deprel))
        corpus.upos_vocab.add(upos)
        corpus.deprel_vocab.add(deprel)
        tok_index += 1
    close_sentence()
    return corpus


# ---------------------------------------------------------------------------
# .rels


@dataclass(frozen=True, slots=True)
class RelsRow:
    """One data line of a .rels file, still in file coordinates (1-based)."""

    ordinal: int
    doc: str
    unit1_toks: str
    unit2_toks: str
    dir: str
    label: str
    orig_label: str
    unit1_txt: str = ""
    unit2_txt: str = ""
    s1_toks: str = ""
    s2_toks: str = ""
    unit1_sent: str = ""
    unit2_sent: str = ""
    signals: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)


def parse_rels(text: str, *, path: str | None = None
               ) -> tuple[list[RelsRow], bool]:
    """Parse a .rels file; returns (rows, signal column present)."""
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise FormatError("missing .rels header line", path=path, line=1)
    header = [h.strip().lower() for h in lines[0].split("\t")]
    missing = [c for c in REQUIRED_RELS_COLUMNS if c not in header]
    if missing:
        raise FormatError(f"header lacks required columns: {', '.join(missing)}",
                          path=path, line=1)
    col = {name: i for i, name in enumerate(header)}
    extra = [name for name in header if name not in KNOWN_RELS_COLUMNS]
    has_signal_col = "signals" in col

    rows: list[RelsRow] = []
    ordinal = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != len(header):
            raise FormatError(
                f"row has {len(cells)} cells but header has {len(header)}",
                path=path, line=lineno)

        def cell(name: str, default: str = "") -> str:
            return cells[col[name]] if name in col else default

        direction = cell("dir").strip()
        if direction not in DIRECTIONS:
            raise FormatError(f"unknown dir value {direction!r}",
                              path=path, line=lineno)
        label = cell("label").strip()
        rows.append(RelsRow(
            ordinal=ordinal,
            doc=cell("doc").strip(),
            unit1_toks=cell("unit1_toks").strip(),
            unit2_toks=cell("unit2_toks").strip(),
            dir=direction,
            label=label,
            orig_label=cell("orig_label").strip() or label,
            unit1_txt=cell("unit1_txt"),
            unit2_txt=cell("unit2_txt"),
            s1_toks=cell("s1_toks"),
            s2_toks=cell("s2_toks"),
            unit1_sent=cell("unit1_sent"),
            unit2_sent=cell("unit2_sent"),
            signals=cells[col["signals"]] if has_signal_col else None,
            metadata={name: cells[col[name]] for name in extra},
        ))
        ordinal += 1
    return rows, has_signal_col


# ---------------------------------------------------------------------------
# Dataset assembly


def derive_genre(doc_id: str) -> str | None:
    """Genre from corpus_genre_name document ids; None when not derivable."""
    parts = doc_id.split("_")
    if len(parts) >= 3:
        return parts[1]
    return None


def build_dataset(rows: list[RelsRow], corpus: ConlluCorpus, dataset_id: str,
                  *, has_signal_col: bool = False, strict: bool = True,
                  display_meta: dict[str, str] | None = None) -> Dataset:
    """Align relation rows to the token layer and assemble a Dataset.

    Units are normalized to text order (arg1 starts first) and the stored
    direction is remapped so it still points from the original source unit.
    Context spans partition the sentence window around the arguments.
    In strict mode any out-of-bounds reference is a hard error; otherwise
    the offending relation is skipped with a warning.
    """
    referenced = {row.doc for row in rows}
    if corpus.has_unnamed_doc:
        if len(referenced) == 1 and len(corpus.doc_ids) == 1:
            corpus.rename_unnamed(next(iter(referenced)))
        else:
            raise AlignmentError(
                f"{dataset_id}: .conllu lacks newdoc ids but .rels references "
                f"{len(referenced)} documents")

    ds = Dataset(
        dataset_id=dataset_id,
        doc_ids=list(corpus.doc_ids),
        tokens=corpus.tokens,
        sent_spans=corpus.sent_spans,
        relations=[],
        disrpt_labels=[],
        orig_labels=[],
        signal_types=[],
        signal_subtypes=[],
        metadata_keys=[],
        upos_vocab=frozenset(corpus.upos_vocab),
        deprel_vocab=frozenset(corpus.deprel_vocab),
        has_signals=has_signal_col,
        display_meta=dict(display_meta or {}),
    )

    for row in rows:
        try:
            rel = _build_relation(row, ds, dataset_id)
        except (AlignmentError, FormatError):
            if strict:
                raise
            log.warning("%s: skipping relation %d (%s)", dataset_id,
                        row.ordinal, row.doc)
            continue
        ds.relations.append(rel)

    ds.disrpt_labels = sorted({r.disrpt_label for r in ds.relations})
    ds.orig_labels = sorted({r.orig_label for r in ds.relations})
    ds.signal_types = sorted({s.sig_type for r in ds.relations for s in r.signals})
    ds.signal_subtypes = sorted({s.sig_subtype for r in ds.relations
                                 for s in r.signals if s.sig_subtype})
    ds.metadata_keys = sorted({k for r in ds.relations for k in r.metadata})
    return ds


def _build_relation(row: RelsRow, ds: Dataset, dataset_id: str) -> Relation:
    if row.doc not in ds.tokens:
        raise AlignmentError(
            f"{dataset_id}: relation {row.ordinal} references unknown document "
            f"{row.doc!r}")
    doc_len = len(ds.tokens[row.doc])

    unit1 = parse_range_expr(row.unit1_toks)
    unit2 = parse_range_expr(row.unit2_toks)
    for name, span in (("unit1", unit1), ("unit2", unit2)):
        if span.last() >= doc_len:
            raise AlignmentError(
                f"{dataset_id}: relation {row.ordinal} ({row.doc}): {name} token "
                f"{span.last() + 1} exceeds document length {doc_len}")
    if unit1.overlaps(unit2):
        raise AlignmentError(
            f"{dataset_id}: relation {row.ordinal} ({row.doc}): unit spans overlap")

    # Text order defines arg1/arg2; the direction arrow keeps following the
    # original unit1 -> unit2 assignment.
    if unit1.first() <= unit2.first():
        arg1, arg2 = unit1, unit2
        source_is_arg1 = row.dir == "1>2"
    else:
        arg1, arg2 = unit2, unit1
        source_is_arg1 = row.dir == "1<2"
    direction = Direction.ONE_TO_TWO if source_is_arg1 else Direction.TWO_TO_ONE

    arg_indices = sorted(set(arg1.indices()) | set(arg2.indices()))
    window = sentence_window(ds, row.doc, arg_indices)
    arg_set = set(arg_indices)
    first_arg, last_arg = arg_indices[0], arg_indices[-1]
    pre, inter, post = [], [], []
    for i in window.indices():
        if i in arg_set:
            continue
        if i < first_arg:
            pre.append(i)
        elif i > last_arg:
            post.append(i)
        else:
            inter.append(i)

    signals: tuple[Signal, ...] = ()
    if row.signals is not None:
        signals = parse_signal_cell(row.signals)
        for sig in signals:
            for pos in sig.token_positions:
                if not 0 <= pos < doc_len:
                    raise AlignmentError(
                        f"{dataset_id}: relation {row.ordinal} ({row.doc}): signal "
                        f"token {pos + 1} exceeds document length {doc_len}")

    metadata = {k: v for k, v in row.metadata.items() if v.strip()}
    genre = derive_genre(row.doc)
    if genre and "genre" not in metadata:
        metadata["genre"] = genre

    return Relation(
        rel_id=f"{dataset_id}#{row.ordinal}",
        doc_id=row.doc,
        arg1=arg1,
        arg2=arg2,
        pre_ctx=Span.from_indices(pre),
        inter_ctx=Span.from_indices(inter),
        post_ctx=Span.from_indices(post),
        direction=direction,
        disrpt_label=row.label,
        orig_label=row.orig_label,
        signals=signals,
        metadata=metadata,
    )


# ---------------------------------------------------------------------------
# Manifests and file loading


@dataclass(frozen=True)
class ManifestEntry:
    dataset_id: str
    rels_path: str
    conllu_path: str
    meta: dict[str, str] = field(default_factory=dict)


def load_manifest(path: str, *, data_root: str | None = None) -> list[ManifestEntry]:
    """Read a dataset manifest: JSON or blank-line-separated key=value blocks.

    Relative paths are resolved against --data-root when given, else
    against the manifest's own directory.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    base = data_root or os.path.dirname(os.path.abspath(path))
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        records = json.loads(text)
        if isinstance(records, dict):
            records = records.get("datasets", [])
    else:
        records = []
        block: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                if block:
                    records.append(block)
                    block = {}
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormatError("manifest line is not key=value",
                                  path=path, line=lineno)
            block[key.strip()] = value.strip()
        if block:
            records.append(block)

    entries = []
    for record in records:
        try:
            dataset_id = record["id"]
            rels = record["rels"]
            conllu = record["conllu"]
        except KeyError as exc:
            raise FormatError(f"manifest record lacks key {exc}", path=path) from None
        meta = {k: str(v) for k, v in record.items()
                if k not in ("id", "rels", "conllu")}
        entries.append(ManifestEntry(
            dataset_id=dataset_id,
            rels_path=os.path.join(base, rels),
            conllu_path=os.path.join(base, conllu),
            meta=meta,
        ))
    return entries


def load_dataset(rels_path: str, conllu_path: str, dataset_id: str,
                 *, strict: bool = True,
                 display_meta: dict[str, str] | None = None) -> Dataset:
    """Load one dataset from its .rels and .conllu files."""
    with open(conllu_path, encoding="utf-8") as fh:
        corpus = parse_conllu(fh.read(), path=conllu_path)
    with open(rels_path, encoding="utf-8") as fh:
        rows, has_signal_col = parse_rels(fh.read(), path=rels_path)
    return build_dataset(rows, corpus, dataset_id,
                         has_signal_col=has_signal_col, strict=strict,
                         display_meta=display_meta)


def load_manifest_entry(entry: ManifestEntry, *, strict: bool = True) -> Dataset:
    return load_dataset(entry.rels_path, entry.conllu_path, entry.dataset_id,
                        strict=strict, display_meta=entry.meta)
