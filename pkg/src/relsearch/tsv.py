"""TSV rendering of result tables, shared by the CLI and the service.

One formatting component so downloads and command-line exports cannot
drift apart. All derived quantities (percentages, expected counts,
residuals, quantiles) print with 4 decimal places and "." as the
decimal separator; raw counts stay integers.
"""

from __future__ import annotations

from .engine import Match
from .ingest import format_signal_cell
from .model import Dataset
from .stats import BoxSummary, CompareTable, CrossTab, FreqTable


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def _table(header: list[str], rows: list[list]) -> str:
    lines = ["\t".join(header)]
    lines.extend("\t".join(fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def freq_tsv(table: FreqTable) -> str:
    return _table(
        [table.variable, "count", "percent"],
        [[row.value, row.count, row.percent] for row in table.rows])


def crosstab_tsv(ct: CrossTab) -> str:
    """Long format, one line per cell; test columns empty when the
    table was too small for the chi-squared test."""
    header = [ct.row_var, ct.col_var, "observed", "expected", "residual",
              "chi2", "dof", "p_value", "sig"]
    rows = []
    for i, rv in enumerate(ct.row_values):
        for j, cv in enumerate(ct.col_values):
            if ct.applicable:
                rows.append([rv, cv, ct.observed[i][j], ct.expected[i][j],
                             ct.residuals[i][j], ct.chi2, ct.dof,
                             ct.p_value, ct.sig])
            else:
                rows.append([rv, cv, ct.observed[i][j], "", "", "", "", "",
                             ""])
    return _table(header, rows)


BOX_COLUMNS = ["n", "min", "q1", "median", "q3", "max",
               "whisker_low", "whisker_high", "outliers"]


def _box_row(box: BoxSummary) -> list:
    return [box.n, box.minimum, box.q1, box.median, box.q3, box.maximum,
            box.whisker_low, box.whisker_high,
            ",".join(fmt(v) for v in box.outliers)]


def box_tsv(box: BoxSummary, variable: str) -> str:
    return _table(["variable"] + BOX_COLUMNS, [[variable] + _box_row(box)])


def grouped_box_tsv(groups: list[tuple[str, BoxSummary]],
                    group_var: str) -> str:
    return _table([group_var] + BOX_COLUMNS,
                  [[g] + _box_row(b) for g, b in groups])


def compare_tsv(table: CompareTable) -> str:
    return _table(
        [table.variable, "count_a", "count_b", "percent_a", "percent_b"],
        [[r.value, r.count_a, r.count_b, r.percent_a, r.percent_b]
         for r in table.rows])


def compare_box_tsv(box_a: BoxSummary | None, box_b: BoxSummary | None,
                    id_a: str, id_b: str) -> str:
    rows = []
    for ds_id, box in ((id_a, box_a), (id_b, box_b)):
        if box is not None:
            rows.append([ds_id] + _box_row(box))
    return _table(["dataset"] + BOX_COLUMNS, rows)


def scatter_tsv(points, x_var: str, y_var: str) -> str:
    return _table(["rel_id", x_var, y_var, "label"],
                  [[p.rel_id, p.x, p.y, p.label] for p in points])


CONCORDANCE_COLUMNS = ["rel_id", "doc_id", "disrpt_label", "orig_label",
                       "direction", "arg1_text", "arg2_text", "signals",
                       "matched_tokens"]


def span_text(ds: Dataset, doc_id: str, span) -> str:
    toks = ds.tokens[doc_id]
    return " ".join(toks[i].form for i in span.indices())


def concordance_tsv(matches: list[Match], ds: Dataset) -> str:
    rows = []
    for m in matches:
        rel = m.relation
        toks = ds.tokens[rel.doc_id]
        rows.append([
            rel.rel_id,
            rel.doc_id,
            rel.disrpt_label,
            rel.orig_label,
            rel.direction.label,
            span_text(ds, rel.doc_id, rel.arg1),
            span_text(ds, rel.doc_id, rel.arg2),
            format_signal_cell(rel.signals),
            " ".join(toks[i].form for i in m.positions),
        ])
    return _table(CONCORDANCE_COLUMNS, rows)
