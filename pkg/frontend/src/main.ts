/**
 * Application entry: wires the query form, tabs, and result pane to the
 * server and keeps the URL fragment in sync, so the address bar is
 * always a shareable link to the current view.
 *
 * One query is in flight at a time: each refresh bumps a sequence
 * number and responses arriving for an older number are dropped, so a
 * fast follow-up query can never be overwritten by a slow stale one.
 */

import { ApiError, exportUrl, fetchDatasets, loadDataset, runCompare, runCrosstab, runFreq, runQuery } from './api.js';
import { esc } from './escape.js';
import { renderCompare, renderCrosstab, renderFreq } from './render/charts.js';
import { renderConcordance } from './render/concordance.js';
import { DEFAULT_STATE, encodeState, formModel, stateFromForm, stateFromFragment } from './state.js';
import type { FormModel } from './state.js';
import type { CrosstabResponse, DatasetInfo, ViewName, ViewState } from './types.js';
import { VIEWS } from './types.js';

// Variable lists mirror the server's statistics vocabulary; dataset
// metadata keys and signal types extend them per dataset.
const NUMERIC_VARS = [
  'arg1_len', 'arg2_len', 'src_len', 'tgt_len',
  'arg1_doc_percentile', 'arg2_doc_percentile',
  'src_doc_percentile', 'tgt_doc_percentile',
  'arg_distance', 'signal_count',
];

const CATEGORICAL_VARS = ['disrpt_label', 'orig_label', 'direction', 'signal_type', 'signal_subtype'];

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let datasets: DatasetInfo[] = [];
let state: ViewState = { ...DEFAULT_STATE };
let requestSeq = 0;
let lastTotal: number | null = null;

// ── Select population ─────────────────────────────────────────────────────

function option(value: string, label?: string): HTMLOptionElement {
  const opt = document.createElement('option');
  opt.value = value;
  opt.textContent = label ?? value;
  return opt;
}

function fillSelect(select: HTMLSelectElement, groups: [string, HTMLOptionElement[]][]): void {
  select.textContent = '';
  for (const [name, options] of groups) {
    if (!options.length) continue;
    if (!name) {
      for (const opt of options) select.append(opt);
      continue;
    }
    const group = document.createElement('optgroup');
    group.label = name;
    group.append(...options);
    select.append(group);
  }
}

/** Keep a restored selection visible even if the list lacks it. */
function ensureOption(select: HTMLSelectElement, value: string): void {
  if (!value) return;
  if (![...select.options].some((o) => o.value === value)) select.append(option(value));
}

function datasetInfo(datasetId: string): DatasetInfo | undefined {
  return datasets.find((d) => d.dataset_id === datasetId);
}

function variableOptions(ds: DatasetInfo | undefined, withEmpty: boolean): [string, HTMLOptionElement[]][] {
  const metaVars = (ds?.metadata_keys ?? []).map((k) => option(`meta:${k}`));
  const presenceVars = (ds?.signal_types ?? []).map((t) => option(`filter_match:signal_type=${t}`));
  return [
    ['', withEmpty ? [option('', '(none)')] : []],
    ['categorical', CATEGORICAL_VARS.map((v) => option(v))],
    ['numeric', NUMERIC_VARS.map((v) => option(v))],
    ['metadata', metaVars],
    ['signal presence', presenceVars],
  ];
}

function populateDatasetControls(ds: DatasetInfo | undefined): void {
  fillSelect($('label') as HTMLSelectElement, [
    ['', [option('', 'any')]],
    ['DISRPT', (ds?.disrpt_labels ?? []).map((l) => option(`disrpt:${l}`, l))],
    ['original', (ds?.orig_labels ?? []).map((l) => option(`orig:${l}`, l))],
  ]);
  fillSelect($('signal-type') as HTMLSelectElement, [
    ['', [option('', 'any'), ...(ds?.signal_types ?? []).map((t) => option(t))]],
  ]);
  fillSelect($('signal-subtype') as HTMLSelectElement, [
    ['', [option('', 'any'), ...(ds?.signal_subtypes ?? []).map((t) => option(t))]],
  ]);
  fillSelect($('variable') as HTMLSelectElement, variableOptions(ds, true));
  fillSelect($('crosstab-variable') as HTMLSelectElement, variableOptions(ds, true));
  fillSelect($('compare-dataset') as HTMLSelectElement, [
    ['', [option('', '(none)'),
          ...datasets.filter((d) => d.dataset_id !== ds?.dataset_id).map((d) => option(d.dataset_id))]],
  ]);
  const stats = ds
    ? `${ds.dataset_id}: ${ds.documents} docs · ${ds.tokens} tokens · ${ds.relations} relations`
    : '';
  $('dataset-stats').textContent = stats;
}

// ── Form read/write ───────────────────────────────────────────────────────

const selectValue = (id: string): string => ($(id) as HTMLSelectElement).value;
const checked = (id: string): boolean => ($(id) as HTMLInputElement).checked;

function readForm(): FormModel {
  return {
    dataset: selectValue('dataset'),
    query: ($('query') as HTMLInputElement).value,
    exact: checked('exact'),
    includeContext: checked('include-context'),
    caseSensitive: checked('case-sensitive'),
    label: selectValue('label'),
    labelNegated: checked('label-neg'),
    direction: selectValue('direction'),
    directionNegated: checked('direction-neg'),
    signalType: selectValue('signal-type'),
    signalTypeNegated: checked('signal-type-neg'),
    signalSubtype: selectValue('signal-subtype'),
    signalSubtypeNegated: checked('signal-subtype-neg'),
    anySignal: selectValue('any-signal') as FormModel['anySignal'],
    tab: state.view,
    variable: selectValue('variable'),
    crosstabVariable: selectValue('crosstab-variable'),
    compareDataset: selectValue('compare-dataset'),
    minCount: Math.max(0, Math.trunc(Number(($('min-count') as HTMLInputElement).value) || 0)),
    page: 1,
    pageSize: state.page_size,
  };
}

function applyForm(model: FormModel): void {
  ($('dataset') as HTMLSelectElement).value = model.dataset;
  ($('query') as HTMLInputElement).value = model.query;
  ($('exact') as HTMLInputElement).checked = model.exact;
  ($('include-context') as HTMLInputElement).checked = model.includeContext;
  ($('case-sensitive') as HTMLInputElement).checked = model.caseSensitive;
  ensureOption($('label') as HTMLSelectElement, model.label);
  ($('label') as HTMLSelectElement).value = model.label;
  ($('label-neg') as HTMLInputElement).checked = model.labelNegated;
  ($('direction') as HTMLSelectElement).value = model.direction;
  ($('direction-neg') as HTMLInputElement).checked = model.directionNegated;
  ensureOption($('signal-type') as HTMLSelectElement, model.signalType);
  ($('signal-type') as HTMLSelectElement).value = model.signalType;
  ($('signal-type-neg') as HTMLInputElement).checked = model.signalTypeNegated;
  ensureOption($('signal-subtype') as HTMLSelectElement, model.signalSubtype);
  ($('signal-subtype') as HTMLSelectElement).value = model.signalSubtype;
  ($('signal-subtype-neg') as HTMLInputElement).checked = model.signalSubtypeNegated;
  ($('any-signal') as HTMLSelectElement).value = model.anySignal;
  ensureOption($('variable') as HTMLSelectElement, model.variable);
  ($('variable') as HTMLSelectElement).value = model.variable;
  ensureOption($('crosstab-variable') as HTMLSelectElement, model.crosstabVariable);
  ($('crosstab-variable') as HTMLSelectElement).value = model.crosstabVariable;
  ($('min-count') as HTMLInputElement).value = String(model.minCount);
  ensureOption($('compare-dataset') as HTMLSelectElement, model.compareDataset);
  ($('compare-dataset') as HTMLSelectElement).value = model.compareDataset;
}

// ── Errors ────────────────────────────────────────────────────────────────

function hideError(): void {
  $('query-error').hidden = true;
}

function showError(exc: unknown): void {
  const box = $('query-error');
  box.hidden = false;
  if (exc instanceof ApiError) {
    let text = `${exc.code}: ${exc.message}`;
    if (exc.code === 'query_parse_error' && exc.detail && typeof exc.detail === 'object') {
      const pos = (exc.detail as Record<string, unknown>).position;
      if (typeof pos === 'number' && pos >= 0) {
        text += `\n${state.query}\n${' '.repeat(pos)}^`;
      }
    }
    const allowed = exc.detail && typeof exc.detail === 'object'
      ? (exc.detail as Record<string, unknown>).allowed : undefined;
    if (Array.isArray(allowed)) text += `\nallowed: ${allowed.join(', ')}`;
    box.textContent = text;
  } else {
    box.textContent = exc instanceof Error ? exc.message : String(exc);
  }
  $('results').innerHTML = '<p class="empty">fix the query above and search again.</p>';
  $('pager').hidden = true;
}

// ── View refresh ──────────────────────────────────────────────────────────

function syncFragment(): void {
  const token = '#' + encodeState(state);
  if (location.hash !== token) history.replaceState(null, '', token);
}

function updateTabs(): void {
  for (const btn of document.querySelectorAll<HTMLButtonElement>('#tabs button[data-view]')) {
    const view = btn.dataset.view as ViewName;
    btn.classList.toggle('active', view === state.view);
    if (view === 'compare') {
      const enabled = Boolean(state.compare_dataset);
      btn.disabled = !enabled;
      btn.title = enabled ? '' : 'pick a comparison dataset first';
    }
  }
}

function updatePager(): void {
  const pager = $('pager');
  if (state.view !== 'matches' || lastTotal === null) {
    pager.hidden = true;
    return;
  }
  const pageSize = Math.max(1, state.page_size);
  const pages = Math.max(1, Math.ceil(lastTotal / pageSize));
  const page = Math.floor(state.offset / pageSize) + 1;
  pager.hidden = false;
  $('page-info').textContent = `page ${page} / ${pages} · ${lastTotal} hits`;
  ($('prev') as HTMLButtonElement).disabled = page <= 1;
  ($('next') as HTMLButtonElement).disabled = page >= pages;
}

async function viewHtml(): Promise<string> {
  if (state.view === 'matches') {
    const resp = await runQuery(state);
    lastTotal = resp.total_hits;
    return renderConcordance(resp);
  }
  if (state.view === 'freq') return renderFreq(await runFreq(state));
  if (state.view === 'crosstab') {
    try {
      return renderCrosstab(await runCrosstab(state));
    } catch (exc) {
      if (exc instanceof ApiError && exc.code === 'test_not_applicable' && exc.detail) {
        return renderCrosstab(exc.detail as CrosstabResponse);
      }
      throw exc;
    }
  }
  if (!state.compare_dataset) {
    return '<p class="empty">pick a comparison dataset in the form above.</p>';
  }
  return renderCompare(await runCompare(state));
}

async function refresh(): Promise<void> {
  syncFragment();
  ($('export-link') as HTMLAnchorElement).href = exportUrl(state);
  updateTabs();
  hideError();
  const seq = ++requestSeq;
  try {
    const html = await viewHtml();
    if (seq !== requestSeq) return;
    $('results').innerHTML = html;
    updatePager();
  } catch (exc) {
    if (seq !== requestSeq) return;
    showError(exc);
  }
}

// ── State transitions ─────────────────────────────────────────────────────

function setState(next: ViewState): void {
  state = next;
  void refresh();
}

function onFormChange(): void {
  setState(stateFromForm(readForm()));
}

async function onDatasetChange(): Promise<void> {
  const datasetId = selectValue('dataset');
  let info = datasetInfo(datasetId);
  if (!info) {
    info = await loadDataset(datasetId);
    datasets.push(info);
  }
  populateDatasetControls(info);
  // Label and signal vocabularies are dataset-specific; stale picks
  // would only produce filter errors, so clear them.
  ($('label') as HTMLSelectElement).value = '';
  ($('signal-type') as HTMLSelectElement).value = '';
  ($('signal-subtype') as HTMLSelectElement).value = '';
  onFormChange();
}

function setTab(view: ViewName): void {
  let next: ViewState = { ...state, view };
  // Stats tabs need a variable; default to the label breakdown rather
  // than greeting the user with a validation error.
  if (view !== 'matches' && !next.variable) next = { ...next, variable: 'disrpt_label' };
  if (view === 'crosstab' && !next.crosstab_variable) next = { ...next, crosstab_variable: 'direction' };
  applyForm(formModel(next));
  setState(next);
}

function turnPage(delta: number): void {
  const pageSize = Math.max(1, state.page_size);
  const offset = Math.max(0, state.offset + delta * pageSize);
  if (lastTotal !== null && offset >= lastTotal && delta > 0) return;
  setState({ ...state, offset });
}

function applyState(next: ViewState): void {
  populateDatasetControls(datasetInfo(next.dataset_id));
  applyForm(formModel(next));
  setState(next);
}

function onHashChange(): void {
  if (location.hash === '#' + encodeState(state)) return;
  try {
    const restored = stateFromFragment(location.hash);
    if (restored) applyState(restored);
  } catch (exc) {
    showError(exc);
  }
}

async function copyLink(): Promise<void> {
  const btn = $('copy-link') as HTMLButtonElement;
  try {
    await navigator.clipboard.writeText(location.href);
    btn.textContent = 'copied';
  } catch {
    btn.textContent = 'copy failed';
  }
  setTimeout(() => { btn.textContent = 'copy link'; }, 1500);
}

// ── Startup ───────────────────────────────────────────────────────────────

async function init(): Promise<void> {
  try {
    datasets = await fetchDatasets();
  } catch (exc) {
    showError(exc);
    return;
  }
  fillSelect($('dataset') as HTMLSelectElement, [
    ['', datasets.map((d) => option(d.dataset_id))],
  ]);

  let restored: ViewState | null = null;
  try {
    restored = stateFromFragment(location.hash);
  } catch {
    restored = null; // garbage fragment: fall back to the default view
  }
  state = restored ?? { ...DEFAULT_STATE, dataset_id: datasets[0]?.dataset_id ?? '' };
  ensureOption($('dataset') as HTMLSelectElement, state.dataset_id);
  populateDatasetControls(datasetInfo(state.dataset_id));
  applyForm(formModel(state));

  $('dataset').addEventListener('change', () => { void onDatasetChange(); });
  for (const id of ['exact', 'include-context', 'case-sensitive', 'label', 'label-neg',
                    'direction', 'direction-neg', 'signal-type', 'signal-type-neg',
                    'signal-subtype', 'signal-subtype-neg', 'any-signal',
                    'variable', 'crosstab-variable', 'min-count', 'compare-dataset']) {
    $(id).addEventListener('change', onFormChange);
  }
  $('search').addEventListener('click', onFormChange);
  $('query').addEventListener('keydown', (ev) => {
    if ((ev as KeyboardEvent).key === 'Enter') onFormChange();
  });
  for (const btn of document.querySelectorAll<HTMLButtonElement>('#tabs button[data-view]')) {
    btn.addEventListener('click', () => setTab(btn.dataset.view as ViewName));
  }
  $('prev').addEventListener('click', () => turnPage(-1));
  $('next').addEventListener('click', () => turnPage(1));
  $('copy-link').addEventListener('click', () => { void copyLink(); });
  window.addEventListener('hashchange', onHashChange);

  if (!VIEWS.includes(state.view)) state = { ...state, view: 'matches' };
  void refresh();
}

document.addEventListener('DOMContentLoaded', () => { void init(); });
