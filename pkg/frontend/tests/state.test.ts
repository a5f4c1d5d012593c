import { describe, expect, it } from 'vitest';

import {
  canonicalJson,
  decodeState,
  DEFAULT_STATE,
  encodeState,
  fromObj,
  stateFromFragment,
  toObj,
} from '../src/state.js';
import type { ViewState } from '../src/types.js';
import { CANON, FULL_STATE, TOKEN } from './fixtures.js';

/** Mint a token the way the server would, from an arbitrary object. */
function tokenFor(obj: unknown): string {
  return Buffer.from(JSON.stringify(obj), 'utf8').toString('base64url');
}

describe('canonical JSON', () => {
  it('matches the server byte for byte on the full state', () => {
    expect(canonicalJson(toObj(FULL_STATE))).toBe(CANON);
  });

  it('sorts keys recursively and keeps unicode raw', () => {
    expect(canonicalJson({ b: 1, a: { d: null, c: 'ä' } })).toBe('{"a":{"c":"ä","d":null},"b":1}');
  });

  it('escapes control characters the way the server does', () => {
    expect(canonicalJson({ q: 'a\tb\n"c"\\' })).toBe('{"q":"a\\tb\\n\\"c\\"\\\\"}');
  });
});

describe('token codec', () => {
  it('decodes the frozen server token to the expected state', () => {
    expect(decodeState(TOKEN)).toEqual(FULL_STATE);
  });

  it('re-encodes that state to the byte-identical token', () => {
    expect(encodeState(FULL_STATE)).toBe(TOKEN);
  });

  it('round-trips the default state', () => {
    expect(decodeState(encodeState(DEFAULT_STATE))).toEqual(DEFAULT_STATE);
  });

  it('round-trips non-ASCII query text', () => {
    const state: ViewState = { ...DEFAULT_STATE, dataset_id: 'deu.rst.pcc', query: 'weiß |ADJ| größer' };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it('accepts padded tokens', () => {
    const padded = TOKEN + '='.repeat((4 - (TOKEN.length % 4)) % 4);
    expect(decodeState(padded)).toEqual(FULL_STATE);
  });

  it('fills defaults for missing keys and ignores unknown ones', () => {
    const state = decodeState(tokenFor({ dataset_id: 'x', bogus: 1 }));
    expect(state).toEqual({ ...DEFAULT_STATE, dataset_id: 'x' });
  });

  it('rejects garbage tokens', () => {
    expect(() => decodeState('!not-base64!')).toThrow(/undecodable/);
    expect(() => decodeState('AAAA')).toThrow(/undecodable/);
  });

  it('rejects unknown views and malformed filters', () => {
    expect(() => decodeState(tokenFor({ view: 'nope' }))).toThrow(/unknown view/);
    expect(() => decodeState(tokenFor({ label: { negated: true } }))).toThrow(/label filter/);
    expect(() => decodeState(tokenFor({ label: { value: 'X', which: 'other' } }))).toThrow(/which/);
    expect(() => decodeState(tokenFor({ direction: 'forward' }))).toThrow(/direction filter/);
  });

  it('defaults a missing label which to disrpt', () => {
    const state = decodeState(tokenFor({ label: { value: 'CONDITION' } }));
    expect(state.label).toEqual({ value: 'CONDITION', negated: false, which: 'disrpt' });
  });
});

describe('fromObj', () => {
  it('rejects non-objects', () => {
    expect(() => fromObj([])).toThrow(/JSON object/);
    expect(() => fromObj('x')).toThrow(/JSON object/);
  });

  it('coerces numeric fields to integers', () => {
    const state = fromObj({ offset: '30', page_size: 10.9 });
    expect(state.offset).toBe(30);
    expect(state.page_size).toBe(10);
  });
});

describe('fragment helpers', () => {
  it('strips the leading # and decodes', () => {
    expect(stateFromFragment('#' + TOKEN)).toEqual(FULL_STATE);
  });

  it('returns null for an empty fragment', () => {
    expect(stateFromFragment('')).toBeNull();
    expect(stateFromFragment('#')).toBeNull();
  });
});
