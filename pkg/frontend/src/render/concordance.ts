/**
 * Concordance rendering: one line per match, arguments delimited and
 * numbered, context dimmed, query hits underlined, signal tokens
 * colored by type.
 */

import { esc } from '../escape.js';
import type { Match, MatchToken, QueryResponse, TokenRole } from '../types.js';

// Fixed legend: discourse markers red, lexical signals yellow, the rest
// keep stable slots. Unlisted types hash into the fallback palette so a
// type keeps its color across pages and sessions.
export const SIGNAL_COLORS: Record<string, string> = {
  dm: '#d62728',
  lexical: '#ffd700',
  syntactic: '#9467bd',
  semantic: '#2ca02c',
  morphological: '#8c564b',
  graphical: '#e377c2',
  reference: '#17becf',
  numerical: '#bcbd22',
  orphan: '#7f7f7f',
};

export const FALLBACK_PALETTE = ['#aec7e8', '#98df8a', '#c5b0d5', '#ff9896', '#dbdb8d'];

export function signalColor(sigType: string): string {
  const fixed = SIGNAL_COLORS[sigType];
  if (fixed) return fixed;
  let h = 0;
  for (let i = 0; i < sigType.length; i++) h = (h * 31 + sigType.charCodeAt(i)) >>> 0;
  return FALLBACK_PALETTE[h % FALLBACK_PALETTE.length]!;
}

// ── Tokens and runs ───────────────────────────────────────────────────────

function tokenHtml(tok: MatchToken): string {
  const classes = ['tok'];
  if (tok.role === null) classes.push('ctx-out');
  else if (tok.role !== 'arg1' && tok.role !== 'arg2') classes.push('ctx');
  let style = '';
  let title = '';
  if (tok.signal_type) {
    classes.push('sig');
    style = ` style="background:${signalColor(tok.signal_type)}"`;
    const sub = tok.signal_subtype && tok.signal_subtype !== tok.signal_type
      ? `;${tok.signal_subtype}` : '';
    title = ` title="signal: ${esc(tok.signal_type + sub)}"`;
  }
  const form = tok.match ? `<u class="hit">${esc(tok.form)}</u>` : esc(tok.form);
  return `<span class="${classes.join(' ')}"${style}${title}>${form}</span>`;
}

interface Run {
  role: TokenRole;
  end: number;
  tokens: MatchToken[];
}

/**
 * Group tokens into consecutive same-role stretches. A position gap
 * starts a new run, so each range of a discontinuous argument gets its
 * own bracket.
 */
function roleRuns(tokens: MatchToken[]): Run[] {
  const runs: Run[] = [];
  for (const tok of tokens) {
    const last = runs[runs.length - 1];
    if (last && last.role === tok.role && tok.pos === last.end + 1) {
      last.tokens.push(tok);
      last.end = tok.pos;
    } else {
      runs.push({ role: tok.role, end: tok.pos, tokens: [tok] });
    }
  }
  return runs;
}

function runHtml(run: Run): string {
  const toks = run.tokens.map(tokenHtml).join(' ');
  if (run.role === 'arg1' || run.role === 'arg2') {
    const n = run.role === 'arg1' ? '1' : '2';
    return `<span class="arg arg-${n}"><sup class="arg-tag">${n}</sup>${toks}</span>`;
  }
  return `<span class="ctx-run">${toks}</span>`;
}

// ── Matches ───────────────────────────────────────────────────────────────

function metaChips(metadata: Record<string, string>): string {
  const keys = Object.keys(metadata);
  if (!keys.length) return '';
  return keys.map((k) => ` <span class="chip">${esc(k)}=${esc(metadata[k]!)}</span>`).join('');
}

export function renderMatch(match: Match): string {
  const head =
    `<div class="match-head"><span class="rel-id">${esc(match.rel_id)}</span>` +
    ` · ${esc(match.doc_id)} · <b>${esc(match.disrpt_label)}</b>` +
    ` (${esc(match.orig_label)}) · ${esc(match.direction)}${metaChips(match.metadata)}</div>`;
  const line = roleRuns(match.tokens).map(runHtml).join(' ');
  return `<div class="match">${head}<div class="match-line">${line}</div></div>`;
}

function legendHtml(matches: Match[]): string {
  const seen: string[] = [];
  for (const m of matches) {
    for (const tok of m.tokens) {
      if (tok.signal_type && !seen.includes(tok.signal_type)) seen.push(tok.signal_type);
    }
  }
  if (!seen.length) return '';
  const chips = seen
    .map((t) => `<span class="chip sig" style="background:${signalColor(t)}">${esc(t)}</span>`)
    .join(' ');
  return `<div class="legend">signals: ${chips}</div>`;
}

export function renderConcordance(resp: QueryResponse): string {
  const pageSize = Math.max(1, resp.page_size);
  const pages = Math.max(1, Math.ceil(resp.total_hits / pageSize));
  const page = Math.floor(resp.offset / pageSize) + 1;
  const head =
    `<div class="result-head">${resp.total_hits} hits · page ${page}/${pages}` +
    ` · ${esc(resp.elapsed_ms)} ms</div>`;
  if (resp.total_hits === 0) {
    return head + '<p class="empty">0 hits: nothing matches this query and filter combination.</p>';
  }
  return head + legendHtml(resp.matches) + resp.matches.map(renderMatch).join('');
}
