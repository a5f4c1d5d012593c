/**
 * Hand-rolled SVG charts for the statistics tabs: frequency bars, box
 * plots, scatter, the residual association plot, and the two-dataset
 * comparison views. Every plotted number comes straight from a server
 * payload; nothing is recomputed here beyond pixel scaling.
 */

import { esc } from '../escape.js';
import type {
  BoxGroupsResponse,
  BoxStats,
  ComparePayload,
  CrosstabPayload,
  CrosstabResponse,
  FreqPayload,
  ScatterResponse,
} from '../types.js';

export const COMPARE_A = '#1f77b4';
export const COMPARE_B = '#ff7f0e';
export const BAR_COLOR = '#1f77b4';

// Residual shading bands: |r| < 2 pale, 2 to 4 medium, 4 and up strong.
export const POS_FILLS = ['#c6dbef', '#6baed6', '#2171b5'];
export const NEG_FILLS = ['#fcbba1', '#fb6a4a', '#cb181d'];
export const NEUTRAL_FILL = '#f4f4f4';

export function residualFill(r: number): string {
  if (r === 0) return NEUTRAL_FILL;
  const band = Math.abs(r) >= 4 ? 2 : Math.abs(r) >= 2 ? 1 : 0;
  return (r > 0 ? POS_FILLS : NEG_FILLS)[band]!;
}

const fmt4 = (n: number): string => n.toFixed(4);
const fmt1 = (n: number): string => n.toFixed(1);

function truncate(label: string, max: number): string {
  return label.length <= max ? label : label.slice(0, max - 1) + '…';
}

// ── Horizontal bars ───────────────────────────────────────────────────────

interface Bar {
  label: string;
  value: number;
  text: string;
  color: string;
}

/** Rows may hold one bar (frequencies) or two (dataset comparison). */
function hbarSvg(rows: Bar[][]): string {
  const LEFT = 180;
  const PLOT = 380;
  const BAR = 16;
  const ROW_GAP = 10;
  const max = Math.max(1e-9, ...rows.flat().map((b) => b.value));
  let y = 8;
  const parts: string[] = [];
  for (const row of rows) {
    const rowH = row.length * BAR;
    parts.push(
      `<text x="${LEFT - 8}" y="${y + rowH / 2 + 4}" text-anchor="end" class="lbl">` +
      `<title>${esc(row[0]!.label)}</title>${esc(truncate(row[0]!.label, 26))}</text>`,
    );
    for (const bar of row) {
      const w = Math.max(1, (bar.value / max) * PLOT);
      parts.push(
        `<rect class="bar" x="${LEFT}" y="${y}" width="${w}" height="${BAR - 2}" fill="${bar.color}"/>`,
        `<text x="${LEFT + w + 5}" y="${y + BAR - 5}" class="val">${esc(bar.text)}</text>`,
      );
      y += BAR;
    }
    y += ROW_GAP;
  }
  const width = LEFT + PLOT + 110;
  return `<svg viewBox="0 0 ${width} ${y}" width="${width}" height="${y}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}

// ── Box plots ─────────────────────────────────────────────────────────────

interface BoxRow {
  label: string;
  box: BoxStats | null;
  color: string;
}

function boxSvg(rows: BoxRow[], axisLabel: string): string {
  const LEFT = 180;
  const PLOT = 420;
  const ROW = 44;
  const extent: number[] = [];
  for (const r of rows) {
    if (r.box) extent.push(r.box.whisker_low, r.box.whisker_high, ...r.box.outliers);
  }
  if (!extent.length) return '<p class="empty">no numeric values to plot.</p>';
  const lo = Math.min(...extent);
  const hi = Math.max(...extent);
  const span = hi - lo || 1;
  const x = (v: number): number => LEFT + ((v - lo) / span) * PLOT;
  const parts: string[] = [];
  rows.forEach((row, i) => {
    const cy = 20 + i * ROW;
    parts.push(
      `<text x="${LEFT - 8}" y="${cy + 4}" text-anchor="end" class="lbl">` +
      `<title>${esc(row.label)}</title>${esc(truncate(row.label, 26))}</text>`,
    );
    const b = row.box;
    if (!b) {
      parts.push(`<text x="${LEFT}" y="${cy + 4}" class="val">n=0</text>`);
      return;
    }
    const title =
      `<title>${esc(row.label)}: n=${b.n} min=${b.min} q1=${b.q1} ` +
      `median=${b.median} q3=${b.q3} max=${b.max}</title>`;
    parts.push(
      `<g class="box">${title}` +
      `<line x1="${x(b.whisker_low)}" y1="${cy}" x2="${x(b.q1)}" y2="${cy}" stroke="${row.color}"/>` +
      `<line x1="${x(b.q3)}" y1="${cy}" x2="${x(b.whisker_high)}" y2="${cy}" stroke="${row.color}"/>` +
      `<line x1="${x(b.whisker_low)}" y1="${cy - 7}" x2="${x(b.whisker_low)}" y2="${cy + 7}" stroke="${row.color}"/>` +
      `<line x1="${x(b.whisker_high)}" y1="${cy - 7}" x2="${x(b.whisker_high)}" y2="${cy + 7}" stroke="${row.color}"/>` +
      `<rect x="${x(b.q1)}" y="${cy - 11}" width="${Math.max(1, x(b.q3) - x(b.q1))}" height="22"` +
      ` fill="${row.color}" fill-opacity="0.35" stroke="${row.color}"/>` +
      `<line class="median" x1="${x(b.median)}" y1="${cy - 11}" x2="${x(b.median)}" y2="${cy + 11}"` +
      ` stroke="${row.color}" stroke-width="2.5"/>` +
      b.outliers.map((v) => `<circle cx="${x(v)}" cy="${cy}" r="2.5" fill="none" stroke="${row.color}"/>`).join('') +
      '</g>',
    );
  });
  const height = 20 + rows.length * ROW;
  const width = LEFT + PLOT + 30;
  parts.push(
    `<text x="${LEFT}" y="${height - 6}" class="axis">${esc(String(lo))}</text>`,
    `<text x="${LEFT + PLOT}" y="${height - 6}" text-anchor="end" class="axis">${esc(String(hi))}</text>`,
    `<text x="${LEFT + PLOT / 2}" y="${height - 6}" text-anchor="middle" class="axis">${esc(axisLabel)}</text>`,
  );
  return `<svg viewBox="0 0 ${width} ${height + 14}" width="${width}" height="${height + 14}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}

function boxStatsTable(rows: BoxRow[]): string {
  const cells = (b: BoxStats): string =>
    [b.n, b.min, b.q1, b.median, b.q3, b.max]
      .map((v) => `<td>${esc(String(v))}</td>`)
      .join('');
  const body = rows
    .map((r) => `<tr><th>${esc(r.label)}</th>${r.box ? cells(r.box) : '<td colspan="6">n=0</td>'}</tr>`)
    .join('');
  return (
    '<table class="stats"><thead><tr><th></th><th>n</th><th>min</th><th>q1</th>' +
    `<th>median</th><th>q3</th><th>max</th></tr></thead><tbody>${body}</tbody></table>`
  );
}

// ── Frequencies tab ───────────────────────────────────────────────────────

export function renderFreq(payload: FreqPayload): string {
  if (payload.kind === 'box') {
    const head = `<div class="result-head">${esc(payload.variable)} · n=${payload.total}</div>`;
    if (!payload.box) return head + '<p class="empty">no values: the match set is empty.</p>';
    const rows: BoxRow[] = [{ label: payload.variable, box: payload.box, color: BAR_COLOR }];
    return head + boxSvg(rows, payload.variable) + boxStatsTable(rows);
  }
  const head = `<div class="result-head">${esc(payload.variable)} · ${payload.total} matches</div>`;
  if (!payload.rows.length) {
    const note = payload.missing_key
      ? `<p class="empty">no match carries ${esc(payload.variable)}.</p>`
      : '<p class="empty">empty table: no matches.</p>';
    return head + note;
  }
  const body = payload.rows
    .map((r) =>
      `<tr><td>${esc(r.value)}</td><td class="num">${r.count}</td>` +
      `<td class="num" title="${esc(r.percent)}">${fmt1(r.percent)}%</td></tr>`)
    .join('');
  const table =
    '<table class="stats"><thead><tr><th>value</th><th>count</th><th>%</th></tr></thead>' +
    `<tbody>${body}</tbody><tfoot><tr><td>total</td><td class="num">${payload.total}</td>` +
    '<td class="num">100%</td></tr></tfoot></table>';
  const bars = payload.rows.map((r) => [
    { label: r.value, value: r.count, text: `${r.count} (${fmt1(r.percent)}%)`, color: BAR_COLOR },
  ]);
  return head + table + hbarSvg(bars);
}

// ── Cross table tab ───────────────────────────────────────────────────────

function observedTable(ct: CrosstabResponse): string {
  const headRow = ct.col_values.map((c) => `<th>${esc(c)}</th>`).join('');
  const body = ct.row_values
    .map((rv, i) => {
      const cells = ct.col_values
        .map((_, j) => {
          const exp = ct.expected ? `<small title="expected">${fmt1(ct.expected[i]![j]!)}</small>` : '';
          return `<td class="num">${ct.observed[i]![j]} ${exp}</td>`;
        })
        .join('');
      return `<tr><th>${esc(rv)}</th>${cells}</tr>`;
    })
    .join('');
  return (
    `<table class="stats"><thead><tr><th>${esc(ct.row_var)} \\ ${esc(ct.col_var)}</th>` +
    `${headRow}</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderResidualPlot(ct: CrosstabResponse): string {
  const residuals = ct.residuals ?? [];
  const CELL = 58;
  const GAP = 6;
  const LEFT = 150;
  const TOP = 54;
  const parts: string[] = [];
  ct.col_values.forEach((cv, j) => {
    const cx = LEFT + j * (CELL + GAP) + CELL / 2;
    parts.push(
      `<text x="${cx}" y="${TOP - 10}" text-anchor="middle" class="lbl">` +
      `<title>${esc(cv)}</title>${esc(truncate(cv, 9))}</text>`,
    );
  });
  ct.row_values.forEach((rv, i) => {
    const cy = TOP + i * (CELL + GAP);
    parts.push(
      `<text x="${LEFT - 8}" y="${cy + CELL / 2 + 4}" text-anchor="end" class="lbl">` +
      `<title>${esc(rv)}</title>${esc(truncate(rv, 20))}</text>`,
    );
    ct.col_values.forEach((cv, j) => {
      const r = residuals[i]?.[j] ?? 0;
      const obs = ct.observed[i]![j]!;
      const exp = ct.expected?.[i]?.[j];
      const title =
        `${rv} × ${cv}: observed ${obs}` +
        (exp === undefined ? '' : `, expected ${fmt4(exp)}, residual ${fmt4(r)}`);
      parts.push(
        `<g><title>${esc(title)}</title>` +
        `<rect class="cell" data-row="${i}" data-col="${j}" x="${LEFT + j * (CELL + GAP)}" y="${cy}"` +
        ` width="${CELL}" height="${CELL}" fill="${residualFill(r)}" stroke="#777"/>` +
        `<text x="${LEFT + j * (CELL + GAP) + CELL / 2}" y="${cy + CELL / 2 + 4}"` +
        ` text-anchor="middle" class="val">${obs}</text></g>`,
      );
    });
  });
  const width = LEFT + ct.col_values.length * (CELL + GAP) + 20;
  const height = TOP + ct.row_values.length * (CELL + GAP) + 10;
  return `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" xmlns="http://www.w3.org/2000/svg">${parts.join('')}</svg>`;
}

function residualLegend(): string {
  const chip = (c: string): string => `<span class="chip" style="background:${c}">&nbsp;&nbsp;</span>`;
  return (
    '<div class="legend">more than expected ' +
    POS_FILLS.map(chip).join('') +
    ' · fewer ' +
    NEG_FILLS.map(chip).join('') +
    ' · bands at |residual| 2 and 4</div>'
  );
}

export function renderCrosstab(payload: CrosstabPayload): string {
  if (payload.kind === 'scatter') return renderScatter(payload);
  if (payload.kind === 'box_groups') return renderBoxGroups(payload);
  const head =
    `<div class="result-head">${esc(payload.row_var)} × ${esc(payload.col_var)}` +
    ` · n=${payload.total}</div>`;
  if (!payload.applicable) {
    return (
      head + observedTable(payload) +
      '<p class="note">chi-squared test not applicable: table smaller than 2×2 after the ' +
      'min-count drop. Observed counts only.</p>'
    );
  }
  const stat =
    `<div class="stat-line">χ² = ${fmt4(payload.chi2!)} · dof = ${payload.dof}` +
    ` · p = ${fmt4(payload.p_value!)} · sig: <span class="sig-code">${esc(payload.sig ?? '')}</span></div>`;
  return head + stat + renderResidualPlot(payload) + residualLegend() + observedTable(payload);
}

// ── Scatter and grouped boxes ─────────────────────────────────────────────

const SCATTER_PALETTE = [
  '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
  '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
];

function renderScatter(payload: ScatterResponse): string {
  const head =
    `<div class="result-head">${esc(payload.x_var)} × ${esc(payload.y_var)}` +
    ` · ${payload.points.length} points</div>`;
  if (!payload.points.length) return head + '<p class="empty">no points to plot.</p>';
  const LEFT = 60;
  const PLOT_W = 420;
  const PLOT_H = 280;
  const xs = payload.points.map((p) => p.x);
  const ys = payload.points.map((p) => p.y);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);
  const px = (v: number): number => LEFT + ((v - xLo) / (xHi - xLo || 1)) * PLOT_W;
  const py = (v: number): number => 10 + PLOT_H - ((v - yLo) / (yHi - yLo || 1)) * PLOT_H;
  const colorOf = new Map<string, string>();
  for (const p of payload.points) {
    if (!colorOf.has(p.label)) colorOf.set(p.label, SCATTER_PALETTE[colorOf.size % SCATTER_PALETTE.length]!);
  }
  const dots = payload.points
    .map((p) =>
      `<circle cx="${px(p.x)}" cy="${py(p.y)}" r="3" fill="${colorOf.get(p.label)}" fill-opacity="0.7">` +
      `<title>${esc(p.rel_id)}: (${p.x}, ${p.y}) ${esc(p.label)}</title></circle>`)
    .join('');
  const frame =
    `<rect x="${LEFT}" y="10" width="${PLOT_W}" height="${PLOT_H}" fill="none" stroke="#999"/>` +
    `<text x="${LEFT}" y="${PLOT_H + 28}" class="axis">${esc(String(xLo))}</text>` +
    `<text x="${LEFT + PLOT_W}" y="${PLOT_H + 28}" text-anchor="end" class="axis">${esc(String(xHi))}</text>` +
    `<text x="${LEFT + PLOT_W / 2}" y="${PLOT_H + 28}" text-anchor="middle" class="axis">${esc(payload.x_var)}</text>` +
    `<text x="${LEFT - 6}" y="${py(yLo)}" text-anchor="end" class="axis">${esc(String(yLo))}</text>` +
    `<text x="${LEFT - 6}" y="${py(yHi)}" text-anchor="end" class="axis">${esc(String(yHi))}</text>`;
  const legend = [...colorOf.entries()]
    .map(([label, color]) => `<span class="chip" style="background:${color}">${esc(label)}</span>`)
    .join(' ');
  const svg =
    `<svg viewBox="0 0 ${LEFT + PLOT_W + 20} ${PLOT_H + 40}" width="${LEFT + PLOT_W + 20}"` +
    ` height="${PLOT_H + 40}" xmlns="http://www.w3.org/2000/svg">${frame}${dots}</svg>`;
  return head + svg + (colorOf.size > 1 ? `<div class="legend">${legend}</div>` : '');
}

function renderBoxGroups(payload: BoxGroupsResponse): string {
  const head =
    `<div class="result-head">${esc(payload.variable)} by ${esc(payload.group_var)}</div>`;
  if (!payload.groups.length) return head + '<p class="empty">no groups: the match set is empty.</p>';
  const rows: BoxRow[] = payload.groups.map((g) => ({ label: g.group, box: g.box, color: BAR_COLOR }));
  return head + boxSvg(rows, payload.variable) + boxStatsTable(rows);
}

// ── Compare tab ───────────────────────────────────────────────────────────

export function renderCompare(payload: ComparePayload): string {
  const legend =
    `<div class="legend"><span class="chip" style="background:${COMPARE_A}">${esc(payload.dataset_a)}</span>` +
    ` n=${payload.total_a} · <span class="chip" style="background:${COMPARE_B}">${esc(payload.dataset_b)}</span>` +
    ` n=${payload.total_b}</div>`;
  if (payload.kind === 'compare_box') {
    const head = `<div class="result-head">${esc(payload.variable)} compared</div>`;
    const rows: BoxRow[] = [
      { label: payload.dataset_a, box: payload.box_a, color: COMPARE_A },
      { label: payload.dataset_b, box: payload.box_b, color: COMPARE_B },
    ];
    if (!payload.box_a && !payload.box_b) return head + legend + '<p class="empty">no values on either side.</p>';
    return head + legend + boxSvg(rows, payload.variable) + boxStatsTable(rows);
  }
  const head = `<div class="result-head">${esc(payload.variable)} compared</div>`;
  if (!payload.rows.length) return head + legend + '<p class="empty">no values on either side.</p>';
  const bars = payload.rows.map((r) => [
    { label: r.value, value: r.percent_a, text: `${r.count_a} (${fmt1(r.percent_a)}%)`, color: COMPARE_A },
    { label: r.value, value: r.percent_b, text: `${r.count_b} (${fmt1(r.percent_b)}%)`, color: COMPARE_B },
  ]);
  const body = payload.rows
    .map((r) =>
      `<tr><td>${esc(r.value)}</td><td class="num">${r.count_a}</td>` +
      `<td class="num">${fmt1(r.percent_a)}%</td><td class="num">${r.count_b}</td>` +
      `<td class="num">${fmt1(r.percent_b)}%</td></tr>`)
    .join('');
  const table =
    `<table class="stats"><thead><tr><th>value</th><th>${esc(payload.dataset_a)}</th><th>%</th>` +
    `<th>${esc(payload.dataset_b)}</th><th>%</th></tr></thead><tbody>${body}</tbody></table>`;
  return head + legend + hbarSvg(bars) + table;
}
