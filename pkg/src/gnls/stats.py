"""One-tailed Wilcoxon signed-rank test.

Tests whether the variant is systematically below the baseline over paired
values.  Zero differences are dropped; absolute differences are ranked with
average ranks for ties; the statistic is W+, the rank sum of the positive
differences (variant worse).  For n <= 20 usable pairs the null
distribution is enumerated exactly (subset-sum counting over the rank
multiset, equivalent to enumerating all 2^n sign assignments); above that a
normal approximation with tie correction and continuity correction is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_MAX_N = 20
MIN_PAIRS = 5


@dataclass
class WilcoxonResult:
    n_used: int
    statistic: float | None  # W+
    p_value: float | None
    method: str  # "exact" | "normal" | "insufficient"
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.p_value is not None

    def significant(self, alpha: float = 0.05) -> bool | None:
        if self.p_value is None:
            return None
        return self.p_value <= alpha


def _ranks_with_ties(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) of ``values``; ties share their mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_p(ranks: np.ndarray, w_plus: float) -> float:
    """P(W+ <= w_plus) by exact counting over all sign assignments.

    Average ranks are half-integers, so doubling makes everything integral;
    the subset-sum table counts, for every achievable doubled rank sum, how
    many of the 2^n assignments reach it.
    """
    r2 = np.rint(2 * ranks).astype(np.int64)
    total = int(r2.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in r2:
        counts[r:] += counts[:-r] if r > 0 else counts
    w2 = int(math.floor(2 * w_plus + 1e-9))
    return float(counts[: w2 + 1].sum() / 2.0 ** len(ranks))


def _normal_p(values: np.ndarray, ranks: np.ndarray, w_plus: float) -> float:
    n = len(ranks)
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(values, return_counts=True)
    var -= float(((tie_counts ** 3 - tie_counts) / 48.0).sum())
    if var <= 0:
        return 1.0
    z = (w_plus - mu + 0.5) / math.sqrt(var)
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def wilcoxon_one_tailed(pairs) -> WilcoxonResult:
    """One-tailed p-value for "variant < baseline" over (baseline, variant) pairs."""
    pairs = list(pairs)
    diffs = np.array([float(v) - float(b) for b, v in pairs], dtype=np.float64)
    diffs = diffs[diffs != 0.0]
    n = len(diffs)
    if n < MIN_PAIRS:
        return WilcoxonResult(n, None, None, "insufficient",
                              reason=f"need >= {MIN_PAIRS} non-zero differences, got {n}")
    absd = np.abs(diffs)
    ranks = _ranks_with_ties(absd)
    w_plus = float(ranks[diffs > 0].sum())
    if n <= EXACT_MAX_N:
        return WilcoxonResult(n, w_plus, _exact_p(ranks, w_plus), "exact")
    return WilcoxonResult(n, w_plus, _normal_p(absd, ranks, w_plus), "normal")
