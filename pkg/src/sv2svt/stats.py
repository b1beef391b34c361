"""MOS score analysis: t-interval means, rank-sum tests, normality checks.

The rank-sum test is exact (full enumeration over rank splits, mid-ranks for
ties) while the pooled sample is small, switching to the tie-corrected
normal approximation above 12 observations.  Both routes are exposed and the
report labels which one produced each p-value.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import t as student_t

from .errors import Sv2SvtError
from .interchange import canonical_json

SYSTEMS = ("baseline", "finetuned")
QUESTIONS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6")
EXACT_TOTAL_N = 12  # exact enumeration cutoff; covers 6-per-group studies


class StatsError(Sv2SvtError):
    pass


def mean_ci(scores, confidence: float = 0.95) -> tuple[float, float]:
    """Mean and Student-t half-width: t_{n-1,(1+c)/2} * s / sqrt(n)."""
    scores = list(scores)
    n = len(scores)
    if n < 2:
        raise StatsError(f"confidence interval needs at least 2 scores, got {n}")
    if not 0 < confidence < 1:
        raise StatsError(f"confidence must be in (0,1), got {confidence}")
    mean = statistics.fmean(scores)
    s = statistics.stdev(scores)
    quantile = float(student_t.ppf((1 + confidence) / 2, n - 1))
    return mean, quantile * s / math.sqrt(n)


# ---------------------------------------------------------------------------
# Wilcoxon rank-sum
# ---------------------------------------------------------------------------

def _midranks(values: list[float]) -> dict[float, float]:
    """Value -> mid-rank over the pooled sample (ties share the average)."""
    ranks: dict[float, float] = {}
    ordered = sorted(values)
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and ordered[j + 1] == ordered[i]:
            j += 1
        ranks[ordered[i]] = (i + 1 + j + 1) / 2.0
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def _rank_sum_counts(scaled_ranks: tuple[int, ...], n1: int) -> np.ndarray:
    """Counts of size-n1 subsets per (doubled) rank sum, via subset-sum DP."""
    total = sum(scaled_ranks)
    dp = np.zeros((n1 + 1, total + 1), dtype=np.int64)
    dp[0, 0] = 1
    for r in scaled_ranks:
        for k in range(n1, 0, -1):
            dp[k, r:] += dp[k - 1, : total + 1 - r]
    return dp[n1]


def _wilcoxon_exact(a: list[float], b: list[float]) -> float:
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    # Mid-ranks are multiples of 0.5; doubling makes the DP integral.
    scaled = tuple(sorted(round(2 * ranks[v]) for v in pooled))
    w = round(2 * sum(ranks[v] for v in a))
    counts = _rank_sum_counts(scaled, len(a))
    total = counts.sum()
    p_low = counts[: w + 1].sum() / total
    p_high = counts[w:].sum() / total
    return min(1.0, 2.0 * min(p_low, p_high))


def _wilcoxon_normal(a: list[float], b: list[float]) -> float:
    n1, n2 = len(a), len(b)
    total = n1 + n2
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    w = sum(ranks[v] for v in a)
    mean = n1 * (total + 1) / 2.0
    tie_sum = 0.0
    for value in set(pooled):
        ties = pooled.count(value)
        tie_sum += ties**3 - ties
    var = n1 * n2 / 12.0 * ((total + 1) - tie_sum / (total * (total - 1)))
    if var <= 0:
        return 1.0
    z = (w - mean) / math.sqrt(var)
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_rank_sum(a, b, method: str = "auto") -> float:
    """Two-sided rank-sum p-value comparing two independent samples.

    ``method`` is ``auto`` (exact up to a pooled size of 12, else the normal
    approximation), ``exact``, or ``approx``.  The exact p doubles the
    smaller tail of the enumerated rank-sum distribution.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise StatsError("rank-sum test needs two non-empty samples")
    if method == "auto":
        method = "exact" if len(a) + len(b) <= EXACT_TOTAL_N else "approx"
    if method == "exact":
        return _wilcoxon_exact(a, b)
    if method == "approx":
        return _wilcoxon_normal(a, b)
    raise StatsError(f"unknown method {method!r}")


def wilcoxon_method_for(n_total: int) -> str:
    return "exact" if n_total <= EXACT_TOTAL_N else "approx"


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    degenerate: bool = False


def ks_statistic(values, cdf) -> float:
    """sup |empirical CDF - cdf| for a continuous reference CDF."""
    ordered = sorted(values)
    n = len(ordered)
    if n == 0:
        raise StatsError("KS statistic needs at least one value")
    d = 0.0
    for i, x in enumerate(ordered, start=1):
        fx = cdf(x)
        d = max(d, i / n - fx, fx - (i - 1) / n)
    return d


def kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival function Q(lambda)."""
    if lam <= 0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = sign * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-12 * abs(total) or abs(term) < 1e-300:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_normality(scores) -> KsResult:
    """KS distance between the sample and a Gaussian fitted to it.

    The p-value uses the asymptotic Kolmogorov distribution with the usual
    finite-n effective scaling.  A zero-variance sample is compared against
    the degenerate point CDF and flagged instead of erroring.
    """
    scores = list(scores)
    n = len(scores)
    if n == 0:
        raise StatsError("normality check needs at least one score")
    mean = statistics.fmean(scores)
    sd = statistics.stdev(scores) if n > 1 else 0.0
    if sd == 0.0:
        # All mass at the mean: ECDF and reference CDF coincide.
        return KsResult(statistic=0.0, p_value=1.0, degenerate=True)
    norm_cdf = lambda x: 0.5 * math.erfc((mean - x) / (sd * math.sqrt(2.0)))
    d = ks_statistic(scores, norm_cdf)
    lam = (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n)) * d
    return KsResult(statistic=d, p_value=kolmogorov_sf(lam))


# ---------------------------------------------------------------------------
# Score tables and the per-question report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScoreRow:
    subject: str
    system: str
    question: str
    score: int


class ScoreTable:
    def __init__(self, rows: list[ScoreRow]):
        for row in rows:
            if row.system not in SYSTEMS:
                raise StatsError(f"unknown system {row.system!r}")
            if row.question not in QUESTIONS:
                raise StatsError(f"unknown question {row.question!r}")
            if not 1 <= row.score <= 5:
                raise StatsError(f"score out of 1..5 range: {row.score}")
        self.rows = list(rows)

    def scores(self, system: str, question: str) -> list[int]:
        return [
            r.score
            for r in self.rows
            if r.system == system and r.question == question
        ]


def parse_score_table(text: str) -> ScoreTable:
    """Parse ``subject,system,question,score`` CSV (header row optional)."""
    rows = []
    reader = csv.reader(io.StringIO(text))
    for lineno, record in enumerate(reader, start=1):
        if not record or all(not f.strip() for f in record):
            continue
        fields = [f.strip() for f in record]
        if lineno == 1 and [f.lower() for f in fields] == [
            "subject", "system", "question", "score",
        ]:
            continue
        if len(fields) != 4:
            raise StatsError(
                f"scores line {lineno}: expected 4 fields, got {len(fields)}"
            )
        try:
            score = int(fields[3])
        except ValueError:
            raise StatsError(f"scores line {lineno}: bad score {fields[3]!r}") from None
        rows.append(ScoreRow(fields[0], fields[1], fields[2], score))
    return ScoreTable(rows)


@dataclass(frozen=True)
class SystemCell:
    n: int
    mean: float | None
    ci_half_width: float | None
    gap: str | None = None  # reason the cell is incomplete


@dataclass(frozen=True)
class QuestionAnalysis:
    question: str
    baseline: SystemCell
    finetuned: SystemCell
    p_value: float | None
    p_method: str | None
    normality: dict  # system -> KsResult
    gap: str | None = None


def _system_cell(scores: list[int], confidence: float) -> SystemCell:
    if not scores:
        return SystemCell(0, None, None, gap="no scores")
    if len(scores) < 2:
        return SystemCell(
            len(scores), statistics.fmean(scores), None,
            gap="confidence interval needs n >= 2",
        )
    mean, half = mean_ci(scores, confidence)
    return SystemCell(len(scores), mean, half)


def analyze(table: ScoreTable, confidence: float = 0.95) -> list[QuestionAnalysis]:
    """Per-question means with confidence intervals and cross-system
    rank-sum p-values; missing cells are reported as explicit gaps."""
    out = []
    for question in QUESTIONS:
        base = table.scores("baseline", question)
        fine = table.scores("finetuned", question)
        cells = {
            "baseline": _system_cell(base, confidence),
            "finetuned": _system_cell(fine, confidence),
        }
        normality = {
            system: ks_normality(scores) if scores else None
            for system, scores in (("baseline", base), ("finetuned", fine))
        }
        if base and fine:
            method = wilcoxon_method_for(len(base) + len(fine))
            p = wilcoxon_rank_sum(base, fine, method)
            gap = None
        else:
            p, method = None, None
            gap = "both systems required for the rank-sum test"
        out.append(
            QuestionAnalysis(
                question=question,
                baseline=cells["baseline"],
                finetuned=cells["finetuned"],
                p_value=p,
                p_method=method,
                normality=normality,
                gap=gap,
            )
        )
    return out


def _format_cell(cell: SystemCell) -> str:
    if cell.mean is None:
        return f"-- ({cell.gap})"
    if cell.ci_half_width is None:
        return f"{cell.mean:.2f} +- n/a (n={cell.n}; {cell.gap})"
    return f"{cell.mean:.2f} +- {cell.ci_half_width:.2f} (n={cell.n})"


def report_text(analysis: list[QuestionAnalysis]) -> str:
    rows = [("Question", "Baseline", "Fine-tuned", "p-value", "Method")]
    for qa in analysis:
        p = f"{qa.p_value:.3f}" if qa.p_value is not None else "--"
        rows.append(
            (
                qa.question,
                _format_cell(qa.baseline),
                _format_cell(qa.finetuned),
                p,
                qa.p_method or "--",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = [
        "  ".join(field.ljust(widths[i]) for i, field in enumerate(row)).rstrip()
        for row in rows
    ]
    return "\n".join(lines) + "\n"


def report_json(analysis: list[QuestionAnalysis]) -> str:
    def cell(c: SystemCell) -> dict:
        return {"n": c.n, "mean": c.mean, "ci_half_width": c.ci_half_width, "gap": c.gap}

    def ks(result: KsResult | None) -> dict | None:
        if result is None:
            return None
        return {
            "statistic": result.statistic,
            "p_value": result.p_value,
            "degenerate": result.degenerate,
        }

    payload = {
        "schema_version": "1",
        "questions": [
            {
                "question": qa.question,
                "baseline": cell(qa.baseline),
                "finetuned": cell(qa.finetuned),
                "p_value": qa.p_value,
                "p_method": qa.p_method,
                "normality": {k: ks(v) for k, v in qa.normality.items()},
                "gap": qa.gap,
            }
            for qa in analysis
        ],
    }
    return canonical_json(payload)
