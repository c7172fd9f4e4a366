"""Classical rank pipeline: Friedman omnibus, Nemenyi CD, Wilcoxon-Holm pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .diagram import CliqueSet, cliques_from_pairs, cliques_from_threshold
from .errors import DegenerateInput, DomainError, ValidationError
from .kernel import check_alpha, chi2_sf, nemenyi_q, normal_sf, table_alpha
from .matrix_io import Direction, PerformanceMatrix
from .report import AnalysisReport, GlobalTest, PairwiseResult, StandardSection

__all__ = [
    "FriedmanResult",
    "HolmDecision",
    "rank_row",
    "rank_matrix",
    "average_ranks",
    "friedman_test",
    "nemenyi_cd",
    "wilcoxon_signed_rank",
    "holm_adjust",
    "pairwise_wilcoxon_holm",
    "standard_section",
    "classic_pipeline",
]


def _fractional_ranks(values: np.ndarray, descending: bool) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of the positions they span."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(-v if descending else v, kind="stable")
    sorted_v = v[order]
    ranks = np.empty(v.size, dtype=np.float64)
    start = 0
    n = v.size
    while start < n:
        end = start
        while end + 1 < n and sorted_v[end + 1] == sorted_v[start]:
            end += 1
        # positions start..end hold ranks start+1..end+1
        ranks[order[start : end + 1]] = 0.5 * (start + end) + 1.0
        start = end + 1
    return ranks


def rank_row(values: Sequence[float]) -> np.ndarray:
    """Fractional ranks of one dataset's results, 1 for the best (largest) value."""
    return _fractional_ranks(np.asarray(values, dtype=np.float64), descending=True)


def rank_matrix(values) -> np.ndarray:
    """Row-wise :func:`rank_row` over an N x k array (or a PerformanceMatrix)."""
    if isinstance(values, PerformanceMatrix):
        values = _oriented_values(values)
    v = np.asarray(values, dtype=np.float64)
    return np.vstack([rank_row(row) for row in v]) if v.shape[0] else np.empty_like(v)


def average_ranks(ranks) -> np.ndarray:
    return np.asarray(ranks, dtype=np.float64).mean(axis=0)


def _oriented_values(matrix: PerformanceMatrix) -> np.ndarray:
    return -matrix.values if matrix.direction is Direction.LOWER_BETTER else matrix.values


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    df: int
    p_value: float
    reject: bool


def friedman_test(avg_ranks: Sequence[float], n: int, k: int | None = None, alpha: float = 0.05) -> FriedmanResult:
    """Friedman chi-squared statistic from average ranks."""
    R = np.asarray(avg_ranks, dtype=np.float64)
    k = R.size if k is None else int(k)
    if k < 2 or R.size != k:
        raise DegenerateInput(f"Friedman test needs k >= 2 average ranks, got k={k} with {R.size} ranks")
    if n < 1:
        raise DegenerateInput("Friedman test needs at least one dataset")
    alpha = check_alpha(alpha)
    stat = 12.0 * n / (k * (k + 1)) * (float(np.sum(R * R)) - k * (k + 1) ** 2 / 4.0)
    # rounding can push the null statistic a hair below zero
    stat = max(stat, 0.0)
    p = chi2_sf(stat, k - 1)
    return FriedmanResult(stat, k - 1, p, p < alpha)


def nemenyi_cd(k: int, n: int, alpha: float = 0.05) -> float:
    """Critical difference of average ranks for the Nemenyi test."""
    if n < 1:
        raise DomainError("number of datasets must be positive")
    return nemenyi_q(k, alpha) * math.sqrt(k * (k + 1) / (6.0 * n))


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided Wilcoxon signed-rank p-value (normal approximation).

    Zero differences are dropped, tied magnitudes share mean ranks, the
    variance carries the tie correction and W+ gets a 0.5 continuity
    correction toward its mean.  All-zero differences give p = 1.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("Wilcoxon test needs two equal-length 1-D samples")
    d = x - y
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return 1.0
    mag = np.abs(d)
    ranks = _fractional_ranks(mag, descending=False)
    w_plus = float(ranks[d > 0].sum())
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(mag, return_counts=True)
    tie_term = float(np.sum(counts.astype(np.float64) ** 3 - counts)) / 48.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    diff = w_plus - mean
    z = math.copysign(max(abs(diff) - 0.5, 0.0), diff) / math.sqrt(var)
    return min(1.0, 2.0 * normal_sf(abs(z)))


@dataclass(frozen=True)
class HolmDecision:
    p_raw: float
    holm_rank: int
    holm_threshold: float
    rejected: bool


def holm_adjust(p_values: Sequence[float], alpha: float = 0.05) -> list[HolmDecision]:
    """Holm step-down decisions, returned in the original order of ``p_values``.

    The i-th smallest p-value (1-based) is compared with alpha / (m - i + 1);
    the first failure retains it and every later hypothesis.
    """
    alpha = check_alpha(alpha)
    p = [float(v) for v in p_values]
    m = len(p)
    if m == 0:
        return []
    if any(not (0.0 <= v <= 1.0) for v in p):
        raise DomainError("p-values must lie in [0, 1]")
    order = sorted(range(m), key=lambda i: (p[i], i))
    decisions: list[HolmDecision | None] = [None] * m
    stopped = False
    for pos, idx in enumerate(order, start=1):
        threshold = alpha / (m - pos + 1)
        if not stopped and p[idx] > threshold:
            stopped = True
        decisions[idx] = HolmDecision(p[idx], pos, threshold, not stopped)
    return decisions  # type: ignore[return-value]


def pairwise_wilcoxon_holm(matrix: PerformanceMatrix, alpha: float = 0.05) -> list[PairwiseResult]:
    """All k(k-1)/2 Wilcoxon tests on raw metric values with Holm decisions."""
    values = _oriented_values(matrix)
    pairs = list(combinations(range(matrix.k), 2))
    p_raw = [wilcoxon_signed_rank(values[:, a], values[:, b]) for a, b in pairs]
    return [
        PairwiseResult(a, b, dec.p_raw, dec.holm_rank, dec.holm_threshold, dec.rejected)
        for (a, b), dec in zip(pairs, holm_adjust(p_raw, alpha))
    ]


def rejection_matrix(pairwise: Sequence[PairwiseResult], k: int) -> np.ndarray:
    rej = np.zeros((k, k), dtype=bool)
    for pr in pairwise:
        rej[pr.method_a, pr.method_b] = rej[pr.method_b, pr.method_a] = pr.rejected
    return rej


def standard_section(
    matrix: PerformanceMatrix,
    alpha: float,
    pairwise: Sequence[PairwiseResult] | None,
    gate: bool = True,
    clique_source: str = "holm",
) -> tuple[StandardSection, list[PairwiseResult] | None]:
    """Build the standard-pipeline section.

    ``pairwise`` may be precomputed (shared with the MARS pipeline) or None.
    Returns the section and the pairwise results it used (None when the
    Friedman gate skipped the post-hoc stage or cliques came from the CD).
    """
    if clique_source not in ("holm", "cd"):
        raise ValidationError(f"unknown clique source {clique_source!r}")
    ranks = rank_matrix(_oriented_values(matrix))
    avg = average_ranks(ranks)
    fr = friedman_test(avg, matrix.n_datasets, matrix.k, alpha)
    cd = nemenyi_cd(matrix.k, matrix.n_datasets, alpha)
    run_posthoc = fr.reject or not gate
    used = None
    if not run_posthoc:
        cliques = CliqueSet((tuple(range(matrix.k)),), *_bounds(avg))
    elif clique_source == "cd":
        cliques = cliques_from_threshold(avg, cd)
    else:
        used = list(pairwise) if pairwise is not None else pairwise_wilcoxon_holm(matrix, alpha)
        cliques = cliques_from_pairs(rejection_matrix(used, matrix.k), avg)
    section = StandardSection(
        avg_ranks=avg.tolist(),
        cd_standard=cd,
        global_test=GlobalTest("friedman", fr.statistic, fr.p_value, fr.reject, df=fr.df),
        posthoc="run" if run_posthoc else "skipped",
        clique_source=clique_source,
        cliques=cliques,
    )
    return section, used


def _bounds(scores) -> tuple[float, float]:
    return float(math.floor(min(scores))), float(math.ceil(max(scores)))


def classic_pipeline(
    matrix: PerformanceMatrix,
    alpha: float = 0.05,
    gate: bool = True,
    clique_source: str = "holm",
) -> AnalysisReport:
    """Friedman test, Nemenyi CD and (if Friedman rejects) Wilcoxon-Holm pairs."""
    alpha = table_alpha(alpha)
    section, pairwise = standard_section(matrix, alpha, None, gate, clique_source)
    if section.posthoc == "run" and pairwise is None:
        pairwise = pairwise_wilcoxon_holm(matrix, alpha)
    return AnalysisReport(
        mode="standard",
        alpha=alpha,
        k=matrix.k,
        n_datasets=matrix.n_datasets,
        method_names=list(matrix.method_names),
        config={
            "direction": matrix.direction.value,
            "friedman_gate": gate,
            "standard_clique_source": clique_source,
        },
        standard=section,
        pairwise=pairwise,
    )
