/**
 * Shareable view state: the client-side mirror of the server's query
 * state object, plus the link-token codec.
 *
 * The token is base64url(canonical JSON) with padding stripped. The
 * canonical form has sorted keys, no whitespace, and raw (non-ASCII)
 * unicode, and the server produces the same bytes for the same state,
 * so a token minted here works verbatim as the ?state= parameter of
 * /export.tsv and vice versa. The URL fragment holds the current token,
 * which is all a shared link is.
 */

import type { FilterValue, LabelFilterValue, ViewName, ViewState } from './types.js';
import { VIEWS } from './types.js';

export const DEFAULT_STATE: ViewState = {
  dataset_id: '',
  query: '',
  exact: false,
  include_context: false,
  case_sensitive: false,
  label: null,
  direction: null,
  signal_type: null,
  signal_subtype: null,
  any_signal: null,
  view: 'matches',
  variable: null,
  crosstab_variable: null,
  compare_dataset: null,
  min_count: 0,
  offset: 0,
  page_size: 50,
};

// ── Canonical JSON ────────────────────────────────────────────────────────

/**
 * Serialize with sorted keys and compact separators. All state keys are
 * ASCII, so code-unit key ordering agrees with the server's sort.
 */
export function canonicalJson(value: unknown): string {
  if (value === null || typeof value !== 'object') return JSON.stringify(value);
  if (Array.isArray(value)) {
    return '[' + value.map((v) => canonicalJson(v)).join(',') + ']';
  }
  const record = value as Record<string, unknown>;
  const parts = Object.keys(record)
    .sort()
    .map((k) => JSON.stringify(k) + ':' + canonicalJson(record[k]));
  return '{' + parts.join(',') + '}';
}

/** Plain-object form with every field present, in the server's shape. */
export function toObj(state: ViewState): ViewState {
  return {
    dataset_id: state.dataset_id,
    query: state.query,
    exact: state.exact,
    include_context: state.include_context,
    case_sensitive: state.case_sensitive,
    label: state.label ? { ...state.label } : null,
    direction: state.direction ? { ...state.direction } : null,
    signal_type: state.signal_type ? { ...state.signal_type } : null,
    signal_subtype: state.signal_subtype ? { ...state.signal_subtype } : null,
    any_signal: state.any_signal,
    view: state.view,
    variable: state.variable,
    crosstab_variable: state.crosstab_variable,
    compare_dataset: state.compare_dataset,
    min_count: state.min_count,
    offset: state.offset,
    page_size: state.page_size,
  };
}

// ── base64url ─────────────────────────────────────────────────────────────

const B64 = 'ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_';

function toBase64url(bytes: Uint8Array): string {
  let out = '';
  for (let i = 0; i < bytes.length; i += 3) {
    const n = ((bytes[i] as number) << 16) | ((bytes[i + 1] ?? 0) << 8) | (bytes[i + 2] ?? 0);
    out += B64[(n >> 18) & 63]! + B64[(n >> 12) & 63]!;
    if (i + 1 < bytes.length) out += B64[(n >> 6) & 63]!;
    if (i + 2 < bytes.length) out += B64[n & 63]!;
  }
  return out;
}

function fromBase64url(text: string): Uint8Array {
  const out: number[] = [];
  let acc = 0;
  let bits = 0;
  for (const ch of text) {
    if (ch === '=') continue;
    const v = B64.indexOf(ch);
    if (v < 0) throw new Error(`undecodable state token: bad character ${JSON.stringify(ch)}`);
    acc = (acc << 6) | v;
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push((acc >> bits) & 0xff);
    }
  }
  return new Uint8Array(out);
}

// ── Token codec ───────────────────────────────────────────────────────────

export function encodeState(state: ViewState): string {
  const raw = new TextEncoder().encode(canonicalJson(toObj(state)));
  return toBase64url(raw);
}

export function decodeState(token: string): ViewState {
  let obj: unknown;
  try {
    const text = new TextDecoder('utf-8', { fatal: true }).decode(fromBase64url(token));
    obj = JSON.parse(text);
  } catch (exc) {
    throw new Error(`undecodable state token: ${exc instanceof Error ? exc.message : exc}`);
  }
  return fromObj(obj);
}

function valueFilter(obj: unknown, where: string): FilterValue | null {
  if (obj === null || obj === undefined) return null;
  if (typeof obj !== 'object' || !('value' in obj)) {
    throw new Error(`${where} filter must be an object with a value`);
  }
  const rec = obj as Record<string, unknown>;
  return { value: String(rec.value), negated: Boolean(rec.negated) };
}

function labelFilter(obj: unknown): LabelFilterValue | null {
  const base = valueFilter(obj, 'label');
  if (base === null) return null;
  const which = (obj as Record<string, unknown>).which ?? 'disrpt';
  if (which !== 'disrpt' && which !== 'orig') {
    throw new Error(`label filter 'which' must be disrpt or orig, got ${JSON.stringify(which)}`);
  }
  return { ...base, which };
}

function toInt(v: unknown, dflt: number): number {
  if (v === undefined || v === null) return dflt;
  const n = Math.trunc(Number(v));
  if (!Number.isFinite(n)) throw new Error(`expected an integer, got ${JSON.stringify(v)}`);
  return n;
}

function optStr(v: unknown): string | null {
  return v === undefined || v === null ? null : String(v);
}

/** Build a full state from parsed JSON; unknown keys are ignored. */
export function fromObj(obj: unknown): ViewState {
  if (obj === null || typeof obj !== 'object' || Array.isArray(obj)) {
    throw new Error('query state must be a JSON object');
  }
  const rec = obj as Record<string, unknown>;
  const view = (rec.view ?? 'matches') as ViewName;
  if (!VIEWS.includes(view)) throw new Error(`unknown view ${JSON.stringify(rec.view)}`);
  return {
    dataset_id: String(rec.dataset_id ?? ''),
    query: String(rec.query ?? ''),
    exact: Boolean(rec.exact),
    include_context: Boolean(rec.include_context),
    case_sensitive: Boolean(rec.case_sensitive),
    label: labelFilter(rec.label),
    direction: valueFilter(rec.direction, 'direction'),
    signal_type: valueFilter(rec.signal_type, 'signal_type'),
    signal_subtype: valueFilter(rec.signal_subtype, 'signal_subtype'),
    any_signal: rec.any_signal === undefined || rec.any_signal === null ? null : Boolean(rec.any_signal),
    view,
    variable: optStr(rec.variable),
    crosstab_variable: optStr(rec.crosstab_variable),
    compare_dataset: optStr(rec.compare_dataset),
    min_count: toInt(rec.min_count, 0),
    offset: toInt(rec.offset, 0),
    page_size: toInt(rec.page_size, 50),
  };
}

/** Decode the token held in a location.hash value; null when empty. */
export function stateFromFragment(fragment: string): ViewState | null {
  const token = fragment.replace(/^#/, '').trim();
  if (!token) return null;
  return decodeState(token);
}

// ── Form model ────────────────────────────────────────────────────────────
//
// The flat control-value view of a state: what each widget should show.
// Restoring a shared link is applying this mapping to the form; reading
// the form back goes through stateFromForm. Offsets snap to page
// boundaries, so the two are inverse on any state the form can produce.

export interface FormModel {
  dataset: string;
  query: string;
  exact: boolean;
  includeContext: boolean;
  caseSensitive: boolean;
  /** '' or 'disrpt:LABEL' / 'orig:LABEL' (split on the first colon). */
  label: string;
  labelNegated: boolean;
  direction: string;
  directionNegated: boolean;
  signalType: string;
  signalTypeNegated: boolean;
  signalSubtype: string;
  signalSubtypeNegated: boolean;
  anySignal: '' | 'yes' | 'no';
  tab: ViewName;
  variable: string;
  crosstabVariable: string;
  compareDataset: string;
  minCount: number;
  page: number;
  pageSize: number;
}

export function formModel(state: ViewState): FormModel {
  const pageSize = Math.max(1, state.page_size);
  return {
    dataset: state.dataset_id,
    query: state.query,
    exact: state.exact,
    includeContext: state.include_context,
    caseSensitive: state.case_sensitive,
    label: state.label ? `${state.label.which}:${state.label.value}` : '',
    labelNegated: state.label?.negated ?? false,
    direction: state.direction?.value ?? '',
    directionNegated: state.direction?.negated ?? false,
    signalType: state.signal_type?.value ?? '',
    signalTypeNegated: state.signal_type?.negated ?? false,
    signalSubtype: state.signal_subtype?.value ?? '',
    signalSubtypeNegated: state.signal_subtype?.negated ?? false,
    anySignal: state.any_signal === null ? '' : state.any_signal ? 'yes' : 'no',
    tab: state.view,
    variable: state.variable ?? '',
    crosstabVariable: state.crosstab_variable ?? '',
    compareDataset: state.compare_dataset ?? '',
    minCount: state.min_count,
    page: Math.floor(Math.max(0, state.offset) / pageSize) + 1,
    pageSize: state.page_size,
  };
}

export function stateFromForm(model: FormModel): ViewState {
  let label: LabelFilterValue | null = null;
  if (model.label) {
    const sep = model.label.indexOf(':');
    const which = model.label.slice(0, sep) === 'orig' ? 'orig' : 'disrpt';
    label = { value: model.label.slice(sep + 1), negated: model.labelNegated, which };
  }
  const filter = (value: string, negated: boolean): FilterValue | null =>
    value ? { value, negated } : null;
  return {
    dataset_id: model.dataset,
    query: model.query,
    exact: model.exact,
    include_context: model.includeContext,
    case_sensitive: model.caseSensitive,
    label,
    direction: filter(model.direction, model.directionNegated),
    signal_type: filter(model.signalType, model.signalTypeNegated),
    signal_subtype: filter(model.signalSubtype, model.signalSubtypeNegated),
    any_signal: model.anySignal === '' ? null : model.anySignal === 'yes',
    view: model.tab,
    variable: model.variable || null,
    crosstab_variable: model.crosstabVariable || null,
    compare_dataset: model.compareDataset || null,
    min_count: model.minCount,
    offset: (Math.max(1, model.page) - 1) * Math.max(1, model.pageSize),
    page_size: model.pageSize,
  };
}
