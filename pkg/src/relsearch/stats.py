"""Descriptive statistics over match sets.

Frequency tables, cross-tabulations with Pearson residuals and a
chi-squared test, five-number summaries for numerical variables, and
side-by-side comparison of two datasets. Everything here consumes
relation lists produced by the engine and returns plain result records;
rendering (plots, TSV) happens elsewhere.

The chi-squared p-value is computed from scratch via the regularized
upper incomplete gamma function (series / continued fraction), keeping
the package dependency-free; the test suite checks it against an
independent implementation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import VariableError
from .model import Dataset, Relation, Span

NUMERIC_VARS = (
    "arg1_len", "arg2_len", "src_len", "tgt_len",
    "arg1_doc_percentile", "arg2_doc_percentile",
    "src_doc_percentile", "tgt_doc_percentile",
    "arg_distance", "signal_count",
)

CATEGORICAL_VARS = (
    "disrpt_label", "orig_label", "direction",
    "signal_type", "signal_subtype",
)

NONE_VALUE = "None"  # row for relations without the property in question


def _allowed_vars() -> list[str]:
    return list(NUMERIC_VARS) + list(CATEGORICAL_VARS) + \
        ["meta:<key>", "filter_match:<field>=<value>"]


def var_kind(var: str) -> str:
    """"numeric" or "categorical"; raises for unknown variables."""
    if var in NUMERIC_VARS:
        return "numeric"
    if var in CATEGORICAL_VARS or var.startswith(("meta:", "filter_match:")):
        return "categorical"
    raise VariableError(f"unknown variable {var!r}", allowed=_allowed_vars())


# ---------------------------------------------------------------------------
# Per-relation variable extraction


def _span_for(rel: Relation, which: str) -> Span:
    if which == "arg1":
        return rel.arg1
    if which == "arg2":
        return rel.arg2
    if which == "src":
        return rel.source()
    return rel.target()


def numeric_value(rel: Relation, var: str, ds: Dataset) -> float:
    """Value of a numerical variable; total over relations and variables."""
    if var.endswith("_len"):
        return float(len(_span_for(rel, var[:-4])))
    if var.endswith("_doc_percentile"):
        span = _span_for(rel, var[: -len("_doc_percentile")])
        return 100.0 * span.first() / len(ds.tokens[rel.doc_id])
    if var == "arg_distance":
        return float(max(0, rel.arg2.first() - rel.arg1.last() - 1))
    if var == "signal_count":
        return float(len(rel.signals))
    raise VariableError(f"unknown numerical variable {var!r}",
                        allowed=list(NUMERIC_VARS))


def _filter_match_value(rel: Relation, selector: str) -> str:
    """yes/no for one filter-style condition, e.g. "label=CONDITION"."""
    fld, _, value = selector.partition("=")
    fld = fld.strip()
    want = value.strip().casefold()
    if fld == "label":
        hit = rel.disrpt_label.casefold() == want
    elif fld == "orig_label":
        hit = rel.orig_label.casefold() == want
    elif fld == "direction":
        hit = rel.direction.label == value.strip()
    elif fld == "signal_type":
        hit = any(s.sig_type.casefold() == want for s in rel.signals)
    elif fld == "signal_subtype":
        hit = any((s.sig_subtype or "").casefold() == want for s in rel.signals)
    elif fld == "any_signal":
        hit = bool(rel.signals)
    else:
        raise VariableError(
            f"unknown filter_match field {fld!r}",
            allowed=["label", "orig_label", "direction", "signal_type",
                     "signal_subtype", "any_signal"])
    return "yes" if hit else "no"


def categorical_units(rel: Relation, var: str) -> list[str]:
    """Category values a relation contributes, one unit each.

    Signal-level variables yield one unit per signal, with a "None" unit
    for signal-less relations, so breakdowns count (relation, signal)
    pairs. All other variables yield exactly one unit.
    """
    if var == "disrpt_label":
        return [rel.disrpt_label]
    if var == "orig_label":
        return [rel.orig_label]
    if var == "direction":
        return [rel.direction.label]
    if var == "signal_type":
        return [s.sig_type for s in rel.signals] or [NONE_VALUE]
    if var == "signal_subtype":
        return [s.sig_subtype or NONE_VALUE for s in rel.signals] or [NONE_VALUE]
    if var.startswith("meta:"):
        return [rel.metadata.get(var[5:], NONE_VALUE)]
    if var.startswith("filter_match:"):
        return [_filter_match_value(rel, var[len("filter_match:"):])]
    raise VariableError(f"unknown categorical variable {var!r}",
                        allowed=_allowed_vars())


# ---------------------------------------------------------------------------
# Frequencies


@dataclass(frozen=True, slots=True)
class FreqRow:
    value: str
    count: int
    percent: float


@dataclass(frozen=True, slots=True)
class FreqTable:
    variable: str
    rows: tuple[FreqRow, ...]
    total: int
    missing_key: bool = False  # metadata key observed in no relation


def frequencies(rels, var: str, ds: Dataset) -> FreqTable:
    """Counts per category value, descending with lexicographic ties."""
    rels = list(rels)
    if var.startswith("meta:"):
        key = var[5:]
        if not any(key in rel.metadata for rel in rels):
            return FreqTable(var, (), 0, missing_key=True)
    counts: Counter[str] = Counter()
    for rel in rels:
        counts.update(categorical_units(rel, var))
    total = sum(counts.values())
    rows = tuple(
        FreqRow(value, n, 100.0 * n / total)
        for value, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    return FreqTable(var, rows, total)


# ---------------------------------------------------------------------------
# Chi-squared machinery


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series expansion."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(500):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi2_sf(x: float, dof: int) -> float:
    """Survival function of the chi-squared distribution."""
    if dof <= 0:
        raise ValueError("dof must be positive")
    if x < 0:
        raise ValueError("chi-squared statistic cannot be negative")
    if x == 0.0:
        return 1.0
    a = dof / 2.0
    half = x / 2.0
    if half < a + 1.0:
        return 1.0 - _lower_gamma_series(a, half)
    return _upper_gamma_cf(a, half)


def sig_code(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.1:
        return "."
    return ""


def chisq_components(observed, *, yates: bool = False):
    """Expected counts, Pearson residuals, chi2, dof, p for a count matrix.

    Marginals must all be positive (crosstab guarantees that by dropping
    empty rows/columns first). With yates=True on a 2x2 table the chi2
    statistic uses the continuity correction; residuals never do, so the
    sum-of-squares identity only holds without it.
    """
    n_rows = len(observed)
    n_cols = len(observed[0])
    r_tot = [sum(row) for row in observed]
    c_tot = [sum(row[j] for row in observed) for j in range(n_cols)]
    total = sum(r_tot)
    expected = [[r_tot[i] * c_tot[j] / total for j in range(n_cols)]
                for i in range(n_rows)]
    residuals = [
        [(observed[i][j] - expected[i][j]) / math.sqrt(expected[i][j])
         for j in range(n_cols)]
        for i in range(n_rows)
    ]
    use_yates = yates and n_rows == 2 and n_cols == 2
    if use_yates:
        chi2 = sum(
            max(abs(observed[i][j] - expected[i][j]) - 0.5, 0.0) ** 2
            / expected[i][j]
            for i in range(n_rows) for j in range(n_cols))
    else:
        chi2 = sum(r * r for row in residuals for r in row)
    dof = (n_rows - 1) * (n_cols - 1)
    return expected, residuals, chi2, dof, chi2_sf(chi2, dof)


# ---------------------------------------------------------------------------
# Cross-tabulation


@dataclass(frozen=True, slots=True)
class CrossTab:
    row_var: str
    col_var: str
    row_values: tuple[str, ...]
    col_values: tuple[str, ...]
    observed: tuple[tuple[int, ...], ...]
    applicable: bool
    expected: tuple[tuple[float, ...], ...] = ()
    residuals: tuple[tuple[float, ...], ...] = ()
    chi2: float = 0.0
    dof: int = 0
    p_value: float = 1.0
    sig: str = ""
    total: int = 0
    yates: bool = False


def crosstab(rels, row_var: str, col_var: str, ds: Dataset, *,
             min_count: int = 0, yates: bool = False) -> CrossTab:
    """Observed/expected/residual matrices with the chi-squared test.

    Rows or columns whose marginal falls under min_count are dropped
    up front; zero marginals (possible after that cut) are dropped too.
    A table smaller than 2x2 after dropping carries observed counts
    only, flagged not applicable.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for rel in rels:
        for rv in categorical_units(rel, row_var):
            for cv in categorical_units(rel, col_var):
                counts[(rv, cv)] += 1

    def marginals(rows, cols):
        r_tot = {r: sum(counts[(r, c)] for c in cols) for r in rows}
        c_tot = {c: sum(counts[(r, c)] for r in rows) for c in cols}
        return r_tot, c_tot

    rows = sorted({r for r, _ in counts})
    cols = sorted({c for _, c in counts})
    r_tot, c_tot = marginals(rows, cols)
    if min_count > 0:
        rows = [r for r in rows if r_tot[r] >= min_count]
        cols = [c for c in cols if c_tot[c] >= min_count]
    while True:
        r_tot, c_tot = marginals(rows, cols)
        kept_rows = [r for r in rows if r_tot[r] > 0]
        kept_cols = [c for c in cols if c_tot[c] > 0]
        if kept_rows == rows and kept_cols == cols:
            break
        rows, cols = kept_rows, kept_cols

    rows.sort(key=lambda r: (-r_tot[r], r))
    cols.sort(key=lambda c: (-c_tot[c], c))
    observed = tuple(tuple(counts[(r, c)] for c in cols) for r in rows)
    total = sum(r_tot[r] for r in rows)

    if len(rows) < 2 or len(cols) < 2:
        return CrossTab(row_var, col_var, tuple(rows), tuple(cols),
                        observed, applicable=False, total=total, yates=yates)

    expected, residuals, chi2, dof, p = chisq_components(
        [list(row) for row in observed], yates=yates)
    return CrossTab(row_var, col_var, tuple(rows), tuple(cols), observed,
                    applicable=True,
                    expected=tuple(tuple(row) for row in expected),
                    residuals=tuple(tuple(row) for row in residuals),
                    chi2=chi2, dof=dof, p_value=p, sig=sig_code(p),
                    total=total, yates=yates and len(rows) == 2
                    and len(cols) == 2)


# ---------------------------------------------------------------------------
# Numerical summaries


@dataclass(frozen=True, slots=True)
class BoxSummary:
    n: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _quantile(sorted_vals: list[float], q: float) -> float:
    """Linear interpolation between closest ranks (the "type 7" rule)."""
    n = len(sorted_vals)
    if n == 1:
        return sorted_vals[0]
    h = (n - 1) * q
    lo = math.floor(h)
    frac = h - lo
    if lo + 1 >= n:
        return sorted_vals[-1]
    return sorted_vals[lo] + frac * (sorted_vals[lo + 1] - sorted_vals[lo])


def box_summary(values) -> BoxSummary | None:
    """Five-number summary with 1.5 IQR whiskers; None for empty input."""
    vals = sorted(float(v) for v in values)
    if not vals:
        return None
    q1 = _quantile(vals, 0.25)
    med = _quantile(vals, 0.5)
    q3 = _quantile(vals, 0.75)
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = [v for v in vals if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in vals if v < lo_fence or v > hi_fence)
    return BoxSummary(
        n=len(vals),
        minimum=vals[0],
        q1=q1,
        median=med,
        q3=q3,
        maximum=vals[-1],
        whisker_low=inside[0] if inside else q1,
        whisker_high=inside[-1] if inside else q3,
        outliers=outliers,
    )


def grouped_box(rels, num_var: str, group_var: str, ds: Dataset
                ) -> list[tuple[str, BoxSummary]]:
    """Box summary of a numerical variable per category value.

    Signal-level grouping duplicates a relation's value into each of
    its signal groups, mirroring the unit rule of frequencies().
    """
    groups: dict[str, list[float]] = {}
    for rel in rels:
        v = numeric_value(rel, num_var, ds)
        for g in categorical_units(rel, group_var):
            groups.setdefault(g, []).append(v)
    out = [(g, box_summary(vals)) for g, vals in groups.items()]
    out.sort(key=lambda item: (-item[1].n, item[0]))
    return out


@dataclass(frozen=True, slots=True)
class ScatterPoint:
    rel_id: str
    x: float
    y: float
    label: str


def scatter(rels, x_var: str, y_var: str, ds: Dataset) -> list[ScatterPoint]:
    return [
        ScatterPoint(rel.rel_id, numeric_value(rel, x_var, ds),
                     numeric_value(rel, y_var, ds), rel.disrpt_label)
        for rel in rels
    ]


# ---------------------------------------------------------------------------
# Two-dataset comparison


@dataclass(frozen=True, slots=True)
class CompareRow:
    value: str
    count_a: int
    count_b: int
    percent_a: float
    percent_b: float


@dataclass(frozen=True, slots=True)
class CompareTable:
    variable: str
    rows: tuple[CompareRow, ...]
    total_a: int
    total_b: int


def compare_categorical(rels_a, rels_b, var: str, ds_a: Dataset,
                        ds_b: Dataset) -> CompareTable:
    """Per-value percentages over the union of observed values.

    Each side is normalized to its own total, so the two percentage
    columns are comparable distributions rather than shared counts.
    """
    fa = frequencies(rels_a, var, ds_a)
    fb = frequencies(rels_b, var, ds_b)
    ca = {row.value: row.count for row in fa.rows}
    cb = {row.value: row.count for row in fb.rows}
    values = sorted(set(ca) | set(cb),
                    key=lambda v: (-(ca.get(v, 0) + cb.get(v, 0)), v))
    rows = tuple(
        CompareRow(
            value=v,
            count_a=ca.get(v, 0),
            count_b=cb.get(v, 0),
            percent_a=100.0 * ca.get(v, 0) / fa.total if fa.total else 0.0,
            percent_b=100.0 * cb.get(v, 0) / fb.total if fb.total else 0.0,
        )
        for v in values
    )
    return CompareTable(var, rows, fa.total, fb.total)


def compare_numeric(rels_a, rels_b, var: str, ds_a: Dataset, ds_b: Dataset
                    ) -> tuple[BoxSummary | None, BoxSummary | None]:
    box_a = box_summary(numeric_value(r, var, ds_a) for r in rels_a)
    box_b = box_summary(numeric_value(r, var, ds_b) for r in rels_b)
    return box_a, box_b
