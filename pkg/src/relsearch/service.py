"""Dataset registry and request orchestration.

This is the layer both the HTTP server and the CLI sit on: it owns
lazy dataset loading (exactly once per dataset under concurrent first
access), turns QueryStates into engine/stats calls, and shapes JSON
payloads. Evaluation time is measured here so elapsed_ms never includes
serialization.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from . import engine, stats, tsv
from .errors import FormatError, RelSearchError, VariableError
from .ingest import ManifestEntry, load_manifest_entry
from .model import Dataset
from .state import QueryState, to_spec


class UnknownDatasetError(RelSearchError):
    """Dataset id absent from the manifest."""


class NotApplicableError(RelSearchError):
    """Chi-squared test not applicable; carries the observed counts."""

    def __init__(self, message: str, payload: dict):
        self.payload = payload
        super().__init__(message)


@dataclass
class LoadedDataset:
    dataset: Dataset
    load_seconds: float
    entry: ManifestEntry | None = None


class DatasetRegistry:
    """Name -> Dataset with exactly-once lazy loading."""

    def __init__(self, entries: list[ManifestEntry] | None = None):
        self._entries: dict[str, ManifestEntry] = {}
        self._loaded: dict[str, LoadedDataset] = {}
        self._locks: dict[str, threading.Lock] = {}
        for entry in entries or []:
            self._entries[entry.dataset_id] = entry
            self._locks[entry.dataset_id] = threading.Lock()

    def dataset_ids(self) -> list[str]:
        return list(self._entries)

    def is_loaded(self, dataset_id: str) -> bool:
        return dataset_id in self._loaded

    def add_dataset(self, ds: Dataset, load_seconds: float = 0.0) -> None:
        """Register an already-built dataset (tests, library use)."""
        self._entries.setdefault(
            ds.dataset_id,
            ManifestEntry(ds.dataset_id, "", "", dict(ds.display_meta)))
        self._locks.setdefault(ds.dataset_id, threading.Lock())
        self._loaded[ds.dataset_id] = LoadedDataset(ds, load_seconds)

    def get(self, dataset_id: str) -> LoadedDataset:
        loaded = self._loaded.get(dataset_id)
        if loaded is not None:
            return loaded
        if dataset_id not in self._entries:
            raise UnknownDatasetError(f"unknown dataset {dataset_id!r}")
        with self._locks[dataset_id]:
            loaded = self._loaded.get(dataset_id)
            if loaded is None:
                t0 = time.perf_counter()
                ds = load_manifest_entry(self._entries[dataset_id])
                engine.get_index(ds)  # index while we hold the lock
                loaded = LoadedDataset(ds, time.perf_counter() - t0,
                                       self._entries[dataset_id])
                self._loaded[dataset_id] = loaded
        return loaded


def dataset_info(loaded: LoadedDataset) -> dict:
    ds = loaded.dataset
    return {
        "dataset_id": ds.dataset_id,
        "documents": len(ds.doc_ids),
        "sentences": ds.sentence_count,
        "tokens": ds.token_count,
        "relations": len(ds.relations),
        "has_signals": ds.has_signals,
        "disrpt_labels": list(ds.disrpt_labels),
        "orig_labels": list(ds.orig_labels),
        "signal_types": list(ds.signal_types),
        "signal_subtypes": list(ds.signal_subtypes),
        "metadata_keys": list(ds.metadata_keys),
        "display_meta": dict(ds.display_meta),
        "load_seconds": round(loaded.load_seconds, 3),
    }


def list_datasets(registry: DatasetRegistry) -> list[dict]:
    return [dataset_info(registry.get(ds_id))
            for ds_id in registry.dataset_ids()]


# ---------------------------------------------------------------------------
# Match serialization


def match_json(ds: Dataset, match: engine.Match) -> dict:
    """Sentence-window tokens with roles, signal types, and match marks.

    Signal tokens outside the window are included with role None so the
    client always sees every signal of the relation.
    """
    rel = match.relation
    roles = engine.role_map(rel)
    sigs = engine.signal_map(rel)
    positions = sorted(set(roles) | set(sigs))
    hit = set(match.positions)
    toks = ds.tokens[rel.doc_id]
    tokens = [
        {
            "pos": i,
            "form": toks[i].form,
            "role": roles.get(i),
            "signal_type": sigs[i].sig_type if i in sigs else None,
            "signal_subtype": sigs[i].sig_subtype if i in sigs else None,
            "match": i in hit,
        }
        for i in positions
    ]
    return {
        "rel_id": rel.rel_id,
        "doc_id": rel.doc_id,
        "disrpt_label": rel.disrpt_label,
        "orig_label": rel.orig_label,
        "direction": rel.direction.label,
        "metadata": dict(rel.metadata),
        "tokens": tokens,
    }


# ---------------------------------------------------------------------------
# Request handlers


def _evaluate_state(state: QueryState, ds: Dataset, *, lenient: bool = False,
                    vocab: tuple[frozenset, frozenset] | None = None):
    upos, deprel = vocab or (ds.upos_vocab, ds.deprel_vocab)
    spec = to_spec(state, upos, deprel)
    t0 = time.perf_counter()
    matches = engine.evaluate(spec, ds, lenient=lenient)
    return matches, (time.perf_counter() - t0) * 1000.0


def run_query(registry: DatasetRegistry, state: QueryState) -> dict:
    ds = registry.get(state.dataset_id).dataset
    matches, elapsed_ms = _evaluate_state(state, ds)
    offset = max(0, state.offset)
    page = matches[offset:offset + max(1, state.page_size)]
    return {
        "dataset_id": ds.dataset_id,
        "total_hits": len(matches),
        "offset": offset,
        "page_size": state.page_size,
        "elapsed_ms": round(elapsed_ms, 3),
        "matches": [match_json(ds, m) for m in page],
    }


def _require_variable(var: str | None, what: str = "variable") -> str:
    if not var:
        raise VariableError(f"no {what} selected",
                            allowed=list(stats.NUMERIC_VARS
                                         + stats.CATEGORICAL_VARS))
    return var


def _box_json(box: stats.BoxSummary | None) -> dict | None:
    if box is None:
        return None
    return {
        "n": box.n,
        "min": box.minimum,
        "q1": box.q1,
        "median": box.median,
        "q3": box.q3,
        "max": box.maximum,
        "whisker_low": box.whisker_low,
        "whisker_high": box.whisker_high,
        "outliers": list(box.outliers),
    }


def run_freq(registry: DatasetRegistry, state: QueryState) -> dict:
    ds = registry.get(state.dataset_id).dataset
    var = _require_variable(state.variable)
    kind = stats.var_kind(var)
    matches, elapsed_ms = _evaluate_state(state, ds)
    rels = [m.relation for m in matches]
    if kind == "numeric":
        t0 = time.perf_counter()
        box = stats.box_summary(stats.numeric_value(r, var, ds) for r in rels)
        elapsed_ms += (time.perf_counter() - t0) * 1000.0
        return {
            "kind": "box",
            "variable": var,
            "total": len(rels),
            "box": _box_json(box),
            "elapsed_ms": round(elapsed_ms, 3),
        }
    t0 = time.perf_counter()
    table = stats.frequencies(rels, var, ds)
    elapsed_ms += (time.perf_counter() - t0) * 1000.0
    return {
        "kind": "freq",
        "variable": var,
        "total": table.total,
        "missing_key": table.missing_key,
        "rows": [{"value": r.value, "count": r.count, "percent": r.percent}
                 for r in table.rows],
        "elapsed_ms": round(elapsed_ms, 3),
    }


def _crosstab_payload(ct: stats.CrossTab) -> dict:
    payload = {
        "kind": "crosstab",
        "row_var": ct.row_var,
        "col_var": ct.col_var,
        "row_values": list(ct.row_values),
        "col_values": list(ct.col_values),
        "observed": [list(row) for row in ct.observed],
        "applicable": ct.applicable,
        "total": ct.total,
    }
    if ct.applicable:
        payload.update({
            "expected": [list(row) for row in ct.expected],
            "residuals": [list(row) for row in ct.residuals],
            "chi2": ct.chi2,
            "dof": ct.dof,
            "p_value": ct.p_value,
            "sig": ct.sig,
        })
    return payload


def _crosstab_result(state: QueryState, ds: Dataset, rels) -> dict:
    """Dispatch on variable kinds: table, grouped boxes, or scatter."""
    row_var = _require_variable(state.variable)
    col_var = _require_variable(state.crosstab_variable, "crosstab variable")
    row_kind = stats.var_kind(row_var)
    col_kind = stats.var_kind(col_var)
    if row_kind == "categorical" and col_kind == "categorical":
        ct = stats.crosstab(rels, row_var, col_var, ds,
                            min_count=state.min_count)
        payload = _crosstab_payload(ct)
        if not ct.applicable:
            raise NotApplicableError(
                "table smaller than 2x2 after dropping; chi-squared test "
                "not applicable", payload)
        return payload
    if row_kind == "numeric" and col_kind == "numeric":
        points = stats.scatter(rels, row_var, col_var, ds)
        return {
            "kind": "scatter",
            "x_var": row_var,
            "y_var": col_var,
            "points": [{"rel_id": p.rel_id, "x": p.x, "y": p.y,
                        "label": p.label} for p in points],
        }
    num_var, group_var = ((row_var, col_var) if row_kind == "numeric"
                          else (col_var, row_var))
    groups = stats.grouped_box(rels, num_var, group_var, ds)
    return {
        "kind": "box_groups",
        "variable": num_var,
        "group_var": group_var,
        "groups": [{"group": g, "box": _box_json(b)} for g, b in groups],
    }


def run_crosstab(registry: DatasetRegistry, state: QueryState) -> dict:
    ds = registry.get(state.dataset_id).dataset
    matches, elapsed_ms = _evaluate_state(state, ds)
    t0 = time.perf_counter()
    payload = _crosstab_result(state, ds, [m.relation for m in matches])
    payload["elapsed_ms"] = round(
        elapsed_ms + (time.perf_counter() - t0) * 1000.0, 3)
    return payload


def _compare_sides(registry: DatasetRegistry, state: QueryState):
    if not state.compare_dataset:
        raise FormatError("no comparison dataset selected")
    ds_a = registry.get(state.dataset_id).dataset
    ds_b = registry.get(state.compare_dataset).dataset
    vocab = (ds_a.upos_vocab | ds_b.upos_vocab,
             ds_a.deprel_vocab | ds_b.deprel_vocab)
    matches_a, ms_a = _evaluate_state(state, ds_a, lenient=True, vocab=vocab)
    matches_b, ms_b = _evaluate_state(state, ds_b, lenient=True, vocab=vocab)
    rels_a = [m.relation for m in matches_a]
    rels_b = [m.relation for m in matches_b]
    return ds_a, ds_b, rels_a, rels_b, ms_a + ms_b


def run_compare(registry: DatasetRegistry, state: QueryState) -> dict:
    ds_a, ds_b, rels_a, rels_b, elapsed_ms = _compare_sides(registry, state)
    var = _require_variable(state.variable)
    kind = stats.var_kind(var)
    t0 = time.perf_counter()
    if kind == "numeric":
        box_a, box_b = stats.compare_numeric(rels_a, rels_b, var, ds_a, ds_b)
        payload = {
            "kind": "compare_box",
            "variable": var,
            "dataset_a": ds_a.dataset_id,
            "dataset_b": ds_b.dataset_id,
            "total_a": len(rels_a),
            "total_b": len(rels_b),
            "box_a": _box_json(box_a),
            "box_b": _box_json(box_b),
        }
    else:
        table = stats.compare_categorical(rels_a, rels_b, var, ds_a, ds_b)
        payload = {
            "kind": "compare",
            "variable": var,
            "dataset_a": ds_a.dataset_id,
            "dataset_b": ds_b.dataset_id,
            "total_a": table.total_a,
            "total_b": table.total_b,
            "rows": [
                {"value": r.value, "count_a": r.count_a, "count_b": r.count_b,
                 "percent_a": r.percent_a, "percent_b": r.percent_b}
                for r in table.rows
            ],
        }
    payload["elapsed_ms"] = round(
        elapsed_ms + (time.perf_counter() - t0) * 1000.0, 3)
    return payload


# ---------------------------------------------------------------------------
# TSV export


def export_tsv(registry: DatasetRegistry, state: QueryState
               ) -> tuple[str, str]:
    """(filename, TSV text) for the state's current view.

    Exports always cover the full result set; pagination is a display
    concern and is ignored here.
    """
    name = f"{state.view}_{state.dataset_id or 'export'}.tsv"
    if state.view == "compare":
        ds_a, ds_b, rels_a, rels_b, _ = _compare_sides(registry, state)
        var = _require_variable(state.variable)
        if stats.var_kind(var) == "numeric":
            box_a, box_b = stats.compare_numeric(rels_a, rels_b, var,
                                                 ds_a, ds_b)
            return name, tsv.compare_box_tsv(box_a, box_b,
                                             ds_a.dataset_id,
                                             ds_b.dataset_id)
        table = stats.compare_categorical(rels_a, rels_b, var, ds_a, ds_b)
        return name, tsv.compare_tsv(table)

    ds = registry.get(state.dataset_id).dataset
    matches, _ = _evaluate_state(state, ds)
    rels = [m.relation for m in matches]
    if state.view == "matches":
        return name, tsv.concordance_tsv(matches, ds)
    if state.view == "freq":
        var = _require_variable(state.variable)
        if stats.var_kind(var) == "numeric":
            box = stats.box_summary(
                stats.numeric_value(r, var, ds) for r in rels)
            if box is None:
                return name, "\t".join(["variable"] + tsv.BOX_COLUMNS) + "\n"
            return name, tsv.box_tsv(box, var)
        return name, tsv.freq_tsv(stats.frequencies(rels, var, ds))
    if state.view == "crosstab":
        row_var = _require_variable(state.variable)
        col_var = _require_variable(state.crosstab_variable,
                                    "crosstab variable")
        row_kind = stats.var_kind(row_var)
        col_kind = stats.var_kind(col_var)
        if row_kind == "categorical" and col_kind == "categorical":
            ct = stats.crosstab(rels, row_var, col_var, ds,
                                min_count=state.min_count)
            return name, tsv.crosstab_tsv(ct)
        if row_kind == "numeric" and col_kind == "numeric":
            return name, tsv.scatter_tsv(
                stats.scatter(rels, row_var, col_var, ds), row_var, col_var)
        num_var, group_var = ((row_var, col_var) if row_kind == "numeric"
                              else (col_var, row_var))
        groups = stats.grouped_box(rels, num_var, group_var, ds)
        return name, tsv.grouped_box_tsv(groups, group_var)
    raise FormatError(f"unknown view {state.view!r}")
