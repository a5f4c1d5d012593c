/**
 * Frozen server responses and tokens, captured from a live server over
 * the demo fixture corpus. Byte-for-byte equality against these is what
 * keeps the client codec and renderers honest without a server in the
 * test loop.
 */

import type { CrosstabResponse, QueryResponse, ViewState } from '../src/types.js';

// Link token and canonical JSON for FULL_STATE, as the server mints them.
export const TOKEN =
  'eyJhbnlfc2lnbmFsIjp0cnVlLCJjYXNlX3NlbnNpdGl2ZSI6dHJ1ZSwiY29tcGFyZV9kYXRhc2V0IjoiZMOkbmlzY2giLCJjcm9zc3RhYl92YXJpYWJsZSI6Im1ldGE6c3BsaXQiLCJkYXRhc2V0X2lkIjoiZGVtbyIsImRpcmVjdGlvbiI6eyJuZWdhdGVkIjpmYWxzZSwidmFsdWUiOiIxPjIifSwiZXhhY3QiOnRydWUsImluY2x1ZGVfY29udGV4dCI6ZmFsc2UsImxhYmVsIjp7Im5lZ2F0ZWQiOnRydWUsInZhbHVlIjoiQ09ORElUSU9OIiwid2hpY2giOiJvcmlnIn0sIm1pbl9jb3VudCI6Miwib2Zmc2V0Ijo1MCwicGFnZV9zaXplIjoyNSwicXVlcnkiOiJpZiB8fCB0aGVuIiwic2lnbmFsX3N1YnR5cGUiOm51bGwsInNpZ25hbF90eXBlIjp7Im5lZ2F0ZWQiOnRydWUsInZhbHVlIjoiZG0ifSwidmFyaWFibGUiOiJkaXNycHRfbGFiZWwiLCJ2aWV3IjoiY3Jvc3N0YWIifQ';

export const CANON =
  '{"any_signal":true,"case_sensitive":true,"compare_dataset":"dänisch",' +
  '"crosstab_variable":"meta:split","dataset_id":"demo",' +
  '"direction":{"negated":false,"value":"1>2"},"exact":true,"include_context":false,' +
  '"label":{"negated":true,"value":"CONDITION","which":"orig"},"min_count":2,' +
  '"offset":50,"page_size":25,"query":"if || then","signal_subtype":null,' +
  '"signal_type":{"negated":true,"value":"dm"},"variable":"disrpt_label","view":"crosstab"}';

export const FULL_STATE: ViewState = {
  dataset_id: 'demo',
  query: 'if || then',
  exact: true,
  include_context: false,
  case_sensitive: true,
  label: { value: 'CONDITION', negated: true, which: 'orig' },
  direction: { value: '1>2', negated: false },
  signal_type: { value: 'dm', negated: true },
  signal_subtype: null,
  any_signal: true,
  view: 'crosstab',
  variable: 'disrpt_label',
  crosstab_variable: 'meta:split',
  compare_dataset: 'dänisch',
  min_count: 2,
  offset: 50,
  page_size: 25,
};

// POST /query response for "if || game" on the demo dataset, elapsed_ms
// stripped (the one field that varies run to run).
export const QUERY_PAYLOAD: QueryResponse = {
  dataset_id: 'demo',
  total_hits: 1,
  offset: 0,
  page_size: 50,
  elapsed_ms: 0,
  matches: [
    {
      rel_id: 'demo#0',
      doc_id: 'GUM_news_flood',
      disrpt_label: 'CONDITION',
      orig_label: 'condition-arg',
      direction: '1>2',
      metadata: { split: 'train', genre: 'news' },
      tokens: [
        { pos: 0, form: 'If', role: 'arg1', signal_type: 'dm', signal_subtype: 'dm', match: true },
        { pos: 1, form: 'it', role: 'arg1', signal_type: null, signal_subtype: null, match: false },
        { pos: 2, form: 'rains', role: 'arg1', signal_type: null, signal_subtype: null, match: false },
        { pos: 3, form: ',', role: 'inter', signal_type: null, signal_subtype: null, match: false },
        { pos: 4, form: 'the', role: 'arg2', signal_type: null, signal_subtype: null, match: false },
        { pos: 5, form: 'game', role: 'arg2', signal_type: null, signal_subtype: null, match: true },
        { pos: 6, form: 'stops', role: 'arg2', signal_type: null, signal_subtype: null, match: false },
        { pos: 7, form: '.', role: 'post', signal_type: null, signal_subtype: null, match: false },
      ],
    },
  ],
};

// POST /crosstab response for the [[20,10],[10,20]] table.
export const CROSSTAB_PAYLOAD: CrosstabResponse = {
  kind: 'crosstab',
  row_var: 'disrpt_label',
  col_var: 'direction',
  row_values: ['A', 'B'],
  col_values: ['1>2', '1<2'],
  observed: [[20, 10], [10, 20]],
  applicable: true,
  total: 60,
  expected: [[15.0, 15.0], [15.0, 15.0]],
  residuals: [
    [1.2909944487358056, -1.2909944487358056],
    [-1.2909944487358056, 1.2909944487358056],
  ],
  chi2: 6.666666666666666,
  dof: 1,
  p_value: 0.009823274507519257,
  sig: '**',
};
