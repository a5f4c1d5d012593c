"""Shareable query state: canonical JSON and base64url link tokens.

The whole UI state (dataset, query text, filters, match mode, breakdown
selections, pagination) serializes to a canonical JSON form: sorted
keys, no whitespace, UTF-8 without ASCII escaping. The link token is the
base64url encoding of those bytes with padding stripped, so any client
producing the same canonical form produces byte-identical tokens.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass

from .deql import LabelFilter, QueryAst, QuerySpec, ValueFilter, parse
from .errors import FormatError

VIEWS = ("matches", "freq", "crosstab", "compare")


@dataclass(frozen=True, slots=True)
class QueryState:
    dataset_id: str = ""
    query: str = ""
    exact: bool = False
    include_context: bool = False
    case_sensitive: bool = False
    label: LabelFilter | None = None
    direction: ValueFilter | None = None
    signal_type: ValueFilter | None = None
    signal_subtype: ValueFilter | None = None
    any_signal: bool | None = None
    view: str = "matches"
    variable: str | None = None
    crosstab_variable: str | None = None
    compare_dataset: str | None = None
    min_count: int = 0
    offset: int = 0
    page_size: int = 50


def _filter_obj(flt) -> dict | None:
    if flt is None:
        return None
    obj = {"value": flt.value, "negated": flt.negated}
    if isinstance(flt, LabelFilter):
        obj["which"] = flt.which
    return obj


def to_obj(state: QueryState) -> dict:
    """Plain-dict form with every field present (canonical shape)."""
    return {
        "dataset_id": state.dataset_id,
        "query": state.query,
        "exact": state.exact,
        "include_context": state.include_context,
        "case_sensitive": state.case_sensitive,
        "label": _filter_obj(state.label),
        "direction": _filter_obj(state.direction),
        "signal_type": _filter_obj(state.signal_type),
        "signal_subtype": _filter_obj(state.signal_subtype),
        "any_signal": state.any_signal,
        "view": state.view,
        "variable": state.variable,
        "crosstab_variable": state.crosstab_variable,
        "compare_dataset": state.compare_dataset,
        "min_count": state.min_count,
        "offset": state.offset,
        "page_size": state.page_size,
    }


def _value_filter(obj, *, where: str) -> ValueFilter | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "value" not in obj:
        raise FormatError(f"{where} filter must be an object with a value")
    return ValueFilter(str(obj["value"]), bool(obj.get("negated", False)))


def _label_filter(obj) -> LabelFilter | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "value" not in obj:
        raise FormatError("label filter must be an object with a value")
    which = obj.get("which", "disrpt")
    if which not in ("disrpt", "orig"):
        raise FormatError(f"label filter 'which' must be disrpt or orig, "
                          f"got {which!r}")
    return LabelFilter(str(obj["value"]), bool(obj.get("negated", False)),
                       which)


def from_obj(obj: dict) -> QueryState:
    """Build a QueryState from parsed JSON; unknown keys are ignored."""
    if not isinstance(obj, dict):
        raise FormatError("query state must be a JSON object")
    view = obj.get("view", "matches")
    if view not in VIEWS:
        raise FormatError(f"unknown view {view!r}")
    any_signal = obj.get("any_signal")
    if any_signal is not None:
        any_signal = bool(any_signal)

    def opt_str(key):
        v = obj.get(key)
        return None if v is None else str(v)

    return QueryState(
        dataset_id=str(obj.get("dataset_id", "")),
        query=str(obj.get("query", "")),
        exact=bool(obj.get("exact", False)),
        include_context=bool(obj.get("include_context", False)),
        case_sensitive=bool(obj.get("case_sensitive", False)),
        label=_label_filter(obj.get("label")),
        direction=_value_filter(obj.get("direction"), where="direction"),
        signal_type=_value_filter(obj.get("signal_type"), where="signal_type"),
        signal_subtype=_value_filter(obj.get("signal_subtype"),
                                     where="signal_subtype"),
        any_signal=any_signal,
        view=view,
        variable=opt_str("variable"),
        crosstab_variable=opt_str("crosstab_variable"),
        compare_dataset=opt_str("compare_dataset"),
        min_count=int(obj.get("min_count", 0)),
        offset=int(obj.get("offset", 0)),
        page_size=int(obj.get("page_size", 50)),
    )


def canonical_json(state: QueryState) -> str:
    return json.dumps(to_obj(state), sort_keys=True,
                      separators=(",", ":"), ensure_ascii=False)


def encode(state: QueryState) -> str:
    """base64url link token of the canonical JSON, padding stripped."""
    raw = canonical_json(state).encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii").rstrip("=")


def decode(token: str) -> QueryState:
    padded = token + "=" * (-len(token) % 4)
    try:
        raw = base64.urlsafe_b64decode(padded.encode("ascii"))
        obj = json.loads(raw.decode("utf-8"))
    except (binascii.Error, UnicodeError, ValueError) as exc:
        raise FormatError(f"undecodable state token: {exc}") from None
    return from_obj(obj)


def to_spec(state: QueryState, upos_vocab: frozenset[str],
            deprel_vocab: frozenset[str]) -> QuerySpec:
    """Parse the state's query text and bundle filters into a QuerySpec."""
    ast: QueryAst = parse(state.query, upos_vocab, deprel_vocab)
    return QuerySpec(
        ast=ast,
        exact=state.exact,
        dataset_id=state.dataset_id,
        label_filter=state.label,
        direction_filter=state.direction,
        signal_type_filter=state.signal_type,
        signal_subtype_filter=state.signal_subtype,
        any_signal_filter=state.any_signal,
        include_context=state.include_context,
        case_sensitive=state.case_sensitive,
        query_text=state.query,
    )
