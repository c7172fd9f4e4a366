"""Magnitude-aware rank statistics (MARS).

Each rank is multiplied by a weight that grows as the method's result
approaches the worst result on that dataset:

    w = (y_max - y_min) / (y - y_min)          for y > y_min

Methods tied at the minimum get the largest above-minimum weight plus the
largest consecutive gap between the sorted above-minimum weights (or plus the
smallest weight when there is no gap to measure).  A method's score is the
mean of rank * weight over datasets; smaller is better and 1 is the floor.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classic import _bounds, _oriented_values, nemenyi_cd, pairwise_wilcoxon_holm, rank_matrix, rejection_matrix
from .diagram import CliqueSet, cliques_from_pairs, cliques_from_threshold
from .errors import DomainError, ValidationError
from .kernel import table_alpha
from .matrix_io import PerformanceMatrix
from .report import AnalysisReport, GlobalTest, MarsSection, PairwiseResult
from .rng import SplitMix64Array

__all__ = [
    "SIGMA_MODES",
    "WeightedRankMatrix",
    "MarsScores",
    "PermutationResult",
    "weight_row",
    "weight_matrix",
    "mars_scores",
    "mars_sigma",
    "mars_cd",
    "null_statistics",
    "permutation_test",
    "mars_section",
    "mars_pipeline",
]

SIGMA_MODES = ("pooled", "method_scores")
_SIGMA_ALIASES = {"pooled": "pooled", "method_scores": "method_scores", "scores": "method_scores"}


def weight_row(values: Sequence[float]) -> np.ndarray:
    """MARS weights for one dataset (higher values are better)."""
    y = np.asarray(values, dtype=np.float64)
    y_max, y_min = y.max(), y.min()
    w = np.ones(y.size, dtype=np.float64)
    if y_max == y_min:
        return w
    above = y > y_min
    with np.errstate(over="ignore", invalid="ignore"):
        w[above] = (y_max - y_min) / (y[above] - y_min)
        sorted_w = np.sort(w[above])
        if sorted_w.size == 1 or sorted_w[0] == sorted_w[-1]:
            penalty = sorted_w[0]
        else:
            penalty = np.diff(sorted_w).max()
        w[~above] = sorted_w[-1] + penalty
    if not np.all(np.isfinite(w)):
        raise DomainError("MARS weight overflow: a margin above the row minimum is too small relative to the row range")
    return w


def weight_matrix(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    return np.vstack([weight_row(row) for row in v])


@dataclass(frozen=True)
class WeightedRankMatrix:
    weights: np.ndarray
    ranks: np.ndarray
    weighted_ranks: np.ndarray


@dataclass(frozen=True)
class MarsScores:
    scores: np.ndarray
    sigma: float
    cd: float


@dataclass(frozen=True)
class PermutationResult:
    observed_statistic: float
    p_value: float
    rho: int
    seed: int
    exceed_count: int


def _column_means(wr: np.ndarray) -> np.ndarray:
    """Means over the dataset axis (-2), summed strictly in row order.

    A fixed summation order keeps the observed statistic and every null
    statistic bit-comparable, whatever the array layout or batch size.
    """
    n = wr.shape[-2]
    acc = np.zeros(wr.shape[:-2] + wr.shape[-1:], dtype=np.float64)
    for i in range(n):
        acc += wr[..., i, :]
    return acc / n


def _population_variance(x: np.ndarray) -> np.ndarray:
    k = x.shape[-1]
    mean = x[..., 0].copy()
    for j in range(1, k):
        mean += x[..., j]
    mean /= k
    ss = np.zeros_like(mean)
    for j in range(k):
        dev = x[..., j] - mean
        ss += dev * dev
    return ss / k


def _weighted_ranks(values: np.ndarray) -> WeightedRankMatrix:
    ranks = rank_matrix(values)
    weights = weight_matrix(values)
    return WeightedRankMatrix(weights, ranks, ranks * weights)


def mars_scores(matrix) -> tuple[WeightedRankMatrix, np.ndarray]:
    """Weighted rank matrix and per-method MARS scores.

    Accepts a PerformanceMatrix (oriented automatically) or a raw N x k
    higher-is-better array.
    """
    values = _oriented_values(matrix) if isinstance(matrix, PerformanceMatrix) else np.asarray(matrix, dtype=np.float64)
    wrm = _weighted_ranks(values)
    return wrm, _column_means(wrm.weighted_ranks)


def _sigma_mode(mode: str) -> str:
    try:
        return _SIGMA_ALIASES[mode]
    except KeyError:
        raise ValidationError(f"unknown sigma mode {mode!r}; expected one of {', '.join(SIGMA_MODES)}") from None


def mars_sigma(weighted: WeightedRankMatrix, sigma_mode: str = "pooled") -> float:
    """Population standard deviation of the weighted ranks.

    ``pooled`` uses all N x k entries, ``method_scores`` the k mean scores.
    """
    mode = _sigma_mode(sigma_mode)
    wr = weighted.weighted_ranks
    if mode == "pooled":
        return float(np.std(wr))
    return float(np.std(_column_means(wr)))


def mars_cd(
    weighted: WeightedRankMatrix,
    k: int,
    n: int,
    alpha: float = 0.05,
    sigma_mode: str = "pooled",
) -> float:
    """Nemenyi CD rescaled by sigma / sqrt((k^2 - 1) / 12)."""
    sigma = mars_sigma(weighted, sigma_mode)
    return nemenyi_cd(k, n, alpha) * sigma / math.sqrt((k * k - 1) / 12.0)


def _permutation_batch(wr: np.ndarray, seed: int, start: int, stop: int) -> np.ndarray:
    """Null statistics for permutation indices start..stop-1."""
    n, k = wr.shape
    p = stop - start
    gen = SplitMix64Array.for_substreams(seed, np.arange(start, stop, dtype=np.uint64))
    perm = np.broadcast_to(np.arange(k), (p, n, k)).copy()
    lanes = np.arange(p)
    for i in range(n):
        row = perm[:, i, :]
        for pos in range(k - 1, 0, -1):
            j = gen.uniform_int(pos + 1)
            tmp = row[lanes, pos].copy()
            row[lanes, pos] = row[lanes, j]
            row[lanes, j] = tmp
    # shuffling a row's values carries each value's rank and weight with it,
    # since both depend only on the value and the row's multiset
    shuffled = np.take_along_axis(np.broadcast_to(wr, (p, n, k)), perm, axis=2)
    return _population_variance(_column_means(shuffled))


def null_statistics(matrix, seed: int, indices: Sequence[int] | range) -> np.ndarray:
    """Permutation statistics S* for the given permutation indices."""
    wrm, _ = mars_scores(matrix)
    idx = list(indices)
    if not idx:
        return np.empty(0)
    if idx != list(range(idx[0], idx[0] + len(idx))):
        return np.concatenate([_permutation_batch(wrm.weighted_ranks, seed, i, i + 1) for i in idx])
    return _permutation_batch(wrm.weighted_ranks, seed, idx[0], idx[0] + len(idx))


def permutation_test(
    matrix,
    rho: int = 10_000,
    seed: int = 42,
    workers: int = 1,
    batch_size: int | None = None,
) -> PermutationResult:
    """Global permutation test on the variance of MARS scores.

    Values are shuffled independently within each dataset; p is the fraction
    of the ``rho`` permutations whose score variance reaches the observed one.
    Each permutation index owns its random stream, so the result depends only
    on (matrix, rho, seed), never on ``workers`` or ``batch_size``.
    """
    if isinstance(rho, bool) or int(rho) != rho or rho < 1:
        raise DomainError(f"rho must be a positive integer, got {rho!r}")
    rho = int(rho)
    wrm, _ = mars_scores(matrix)
    wr = wrm.weighted_ranks
    observed = float(_population_variance(_column_means(wr)))
    n, k = wr.shape
    if batch_size is None:
        batch_size = max(1, 1_000_000 // (n * k))
    bounds = [(s, min(s + batch_size, rho)) for s in range(0, rho, batch_size)]

    def count(b):
        return int(np.count_nonzero(_permutation_batch(wr, seed, *b) >= observed))

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            exceed = sum(pool.map(count, bounds))
    else:
        exceed = sum(count(b) for b in bounds)
    return PermutationResult(observed, exceed / rho, rho, int(seed), exceed)


def mars_section(
    matrix: PerformanceMatrix,
    alpha: float,
    pairwise: Sequence[PairwiseResult],
    rho: int = 10_000,
    seed: int = 42,
    sigma_mode: str = "pooled",
    clique_source: str = "cd",
    workers: int = 1,
) -> MarsSection:
    mode = _sigma_mode(sigma_mode)
    if clique_source not in ("cd", "holm"):
        raise ValidationError(f"unknown clique source {clique_source!r}")
    wrm, scores = mars_scores(matrix)
    sigma = mars_sigma(wrm, mode)
    cd = mars_cd(wrm, matrix.k, matrix.n_datasets, alpha, mode)
    perm = permutation_test(matrix, rho, seed, workers=workers)
    if clique_source == "holm":
        cliques = cliques_from_pairs(rejection_matrix(pairwise, matrix.k), scores)
    elif sigma == 0.0:
        # every weighted rank is identical: nothing separates any pair
        cliques = CliqueSet((tuple(range(matrix.k)),), *_bounds(scores))
    else:
        cliques = cliques_from_threshold(scores, cd)
    return MarsSection(
        mars_scores=scores.tolist(),
        sigma=sigma,
        sigma_mode=mode,
        cd_mars=cd,
        global_test=GlobalTest(
            "permutation", perm.observed_statistic, perm.p_value, perm.p_value < alpha, rho=perm.rho, seed=perm.seed
        ),
        clique_source=clique_source,
        cliques=cliques,
    )


def mars_pipeline(
    matrix: PerformanceMatrix,
    alpha: float = 0.05,
    rho: int = 10_000,
    seed: int = 42,
    sigma_mode: str = "pooled",
    clique_source: str = "cd",
    workers: int = 1,
) -> AnalysisReport:
    """MARS scores, CD_MARS, permutation test and Wilcoxon-Holm pairs."""
    alpha = table_alpha(alpha)
    pairwise = pairwise_wilcoxon_holm(matrix, alpha)
    section = mars_section(matrix, alpha, pairwise, rho, seed, sigma_mode, clique_source, workers)
    return AnalysisReport(
        mode="mars",
        alpha=alpha,
        k=matrix.k,
        n_datasets=matrix.n_datasets,
        method_names=list(matrix.method_names),
        config={
            "direction": matrix.direction.value,
            "sigma_mode": section.sigma_mode,
            "clique_source": clique_source,
            "rho": int(rho),
            "seed": int(seed),
        },
        mars=section,
        pairwise=pairwise,
    )
