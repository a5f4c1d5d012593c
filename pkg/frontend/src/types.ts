/**
 * Wire types for the relsearch HTTP/JSON protocol.
 *
 * Every interface here mirrors a server payload field for field; the UI
 * never derives statistics of its own, so these shapes are the complete
 * vocabulary of what gets displayed.
 */

export type ViewName = 'matches' | 'freq' | 'crosstab' | 'compare';

export const VIEWS: ViewName[] = ['matches', 'freq', 'crosstab', 'compare'];

// ── Query state (shared with the server and the link token) ──────────────

export interface FilterValue {
  value: string;
  negated: boolean;
}

export interface LabelFilterValue extends FilterValue {
  which: 'disrpt' | 'orig';
}

export interface ViewState {
  dataset_id: string;
  query: string;
  exact: boolean;
  include_context: boolean;
  case_sensitive: boolean;
  label: LabelFilterValue | null;
  direction: FilterValue | null;
  signal_type: FilterValue | null;
  signal_subtype: FilterValue | null;
  any_signal: boolean | null;
  view: ViewName;
  variable: string | null;
  crosstab_variable: string | null;
  compare_dataset: string | null;
  min_count: number;
  offset: number;
  page_size: number;
}

// ── /datasets and /load ───────────────────────────────────────────────────

export interface DatasetInfo {
  dataset_id: string;
  documents: number;
  sentences: number;
  tokens: number;
  relations: number;
  has_signals: boolean;
  disrpt_labels: string[];
  orig_labels: string[];
  signal_types: string[];
  signal_subtypes: string[];
  metadata_keys: string[];
  display_meta: Record<string, string>;
  load_seconds: number;
}

// ── /query ────────────────────────────────────────────────────────────────

export type TokenRole = 'arg1' | 'arg2' | 'pre' | 'inter' | 'post' | null;

export interface MatchToken {
  pos: number;
  form: string;
  role: TokenRole;
  signal_type: string | null;
  signal_subtype: string | null;
  match: boolean;
}

export interface Match {
  rel_id: string;
  doc_id: string;
  disrpt_label: string;
  orig_label: string;
  direction: string;
  metadata: Record<string, string>;
  tokens: MatchToken[];
}

export interface QueryResponse {
  dataset_id: string;
  total_hits: number;
  offset: number;
  page_size: number;
  elapsed_ms: number;
  matches: Match[];
}

// ── /freq ─────────────────────────────────────────────────────────────────

export interface BoxStats {
  n: number;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  whisker_low: number;
  whisker_high: number;
  outliers: number[];
}

export interface FreqRow {
  value: string;
  count: number;
  percent: number;
}

export interface FreqResponse {
  kind: 'freq';
  variable: string;
  total: number;
  missing_key: boolean;
  rows: FreqRow[];
  elapsed_ms: number;
}

export interface BoxResponse {
  kind: 'box';
  variable: string;
  total: number;
  box: BoxStats | null;
  elapsed_ms: number;
}

export type FreqPayload = FreqResponse | BoxResponse;

// ── /crosstab ─────────────────────────────────────────────────────────────

export interface CrosstabResponse {
  kind: 'crosstab';
  row_var: string;
  col_var: string;
  row_values: string[];
  col_values: string[];
  observed: number[][];
  applicable: boolean;
  total: number;
  expected?: number[][];
  residuals?: number[][];
  chi2?: number;
  dof?: number;
  p_value?: number;
  sig?: string;
  elapsed_ms?: number;
}

export interface ScatterPoint {
  rel_id: string;
  x: number;
  y: number;
  label: string;
}

export interface ScatterResponse {
  kind: 'scatter';
  x_var: string;
  y_var: string;
  points: ScatterPoint[];
  elapsed_ms?: number;
}

export interface BoxGroup {
  group: string;
  box: BoxStats | null;
}

export interface BoxGroupsResponse {
  kind: 'box_groups';
  variable: string;
  group_var: string;
  groups: BoxGroup[];
  elapsed_ms?: number;
}

export type CrosstabPayload = CrosstabResponse | ScatterResponse | BoxGroupsResponse;

// ── /compare ──────────────────────────────────────────────────────────────

export interface CompareRow {
  value: string;
  count_a: number;
  count_b: number;
  percent_a: number;
  percent_b: number;
}

export interface CompareResponse {
  kind: 'compare';
  variable: string;
  dataset_a: string;
  dataset_b: string;
  total_a: number;
  total_b: number;
  rows: CompareRow[];
  elapsed_ms?: number;
}

export interface CompareBoxResponse {
  kind: 'compare_box';
  variable: string;
  dataset_a: string;
  dataset_b: string;
  total_a: number;
  total_b: number;
  box_a: BoxStats | null;
  box_b: BoxStats | null;
  elapsed_ms?: number;
}

export type ComparePayload = CompareResponse | CompareBoxResponse;

// ── Errors ────────────────────────────────────────────────────────────────

export interface ErrorBody {
  code: string;
  message: string;
  detail: unknown;
}
