import { describe, expect, it } from 'vitest';

import { decodeState, formModel, stateFromForm } from '../src/state.js';
import { FULL_STATE, TOKEN } from './fixtures.js';

// applyForm assigns each FormModel field to its control verbatim, so
// the model IS what a restored link puts into the widgets.
describe('shared-link restore', () => {
  const model = formModel(decodeState(TOKEN));

  it('restores the drop-downs', () => {
    expect(model.dataset).toBe('demo');
    expect(model.label).toBe('orig:CONDITION');
    expect(model.labelNegated).toBe(true);
    expect(model.direction).toBe('1>2');
    expect(model.directionNegated).toBe(false);
    expect(model.signalType).toBe('dm');
    expect(model.signalTypeNegated).toBe(true);
    expect(model.signalSubtype).toBe('');
    expect(model.anySignal).toBe('yes');
    expect(model.variable).toBe('disrpt_label');
    expect(model.crosstabVariable).toBe('meta:split');
    expect(model.compareDataset).toBe('dänisch');
    expect(model.minCount).toBe(2);
  });

  it('restores the query text and match-mode toggles', () => {
    expect(model.query).toBe('if || then');
    expect(model.exact).toBe(true);
    expect(model.includeContext).toBe(false);
    expect(model.caseSensitive).toBe(true);
  });

  it('restores the active tab', () => {
    expect(model.tab).toBe('crosstab');
  });

  it('restores the page', () => {
    expect(model.page).toBe(3); // offset 50 at page size 25
    expect(model.pageSize).toBe(25);
  });
});

describe('form model inverse', () => {
  it('reading the restored form back yields the identical state', () => {
    expect(stateFromForm(formModel(FULL_STATE))).toEqual(FULL_STATE);
  });

  it('splits label choices on the first colon only', () => {
    const state = stateFromForm(formModel({
      ...FULL_STATE,
      label: { value: 'attribution:positive', negated: false, which: 'orig' },
    }));
    expect(state.label).toEqual({ value: 'attribution:positive', negated: false, which: 'orig' });
  });

  it('maps empty selections to absent filters', () => {
    const state = stateFromForm({
      ...formModel(FULL_STATE),
      label: '',
      direction: '',
      signalType: '',
      signalSubtype: '',
      anySignal: '',
      variable: '',
      crosstabVariable: '',
      compareDataset: '',
    });
    expect(state.label).toBeNull();
    expect(state.direction).toBeNull();
    expect(state.signal_type).toBeNull();
    expect(state.signal_subtype).toBeNull();
    expect(state.any_signal).toBeNull();
    expect(state.variable).toBeNull();
    expect(state.crosstab_variable).toBeNull();
    expect(state.compare_dataset).toBeNull();
  });
});
