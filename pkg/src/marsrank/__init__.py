"""Rank statistics for comparing methods over many datasets.

Two pipelines share one input (a datasets x methods performance matrix):

* the classical Friedman / Nemenyi / Wilcoxon-Holm analysis, and
* magnitude-aware rank statistics (MARS), which weight each rank by how far
  the method sits above the worst performer on that dataset.
"""

__version__ = "0.1.0"

from .matrix_io import Direction, PerformanceMatrix, orient, parse_matrix, read_matrix, to_csv, to_json  # noqa: E402
from .kernel import chi2_sf, inverse_normal_cdf, nemenyi_q, normal_sf  # noqa: E402
from .classic import (  # noqa: E402
    FriedmanResult,
    average_ranks,
    classic_pipeline,
    friedman_test,
    holm_adjust,
    nemenyi_cd,
    rank_matrix,
    rank_row,
    wilcoxon_signed_rank,
)
from .mars import (  # noqa: E402
    MarsScores,
    PermutationResult,
    WeightedRankMatrix,
    mars_cd,
    mars_pipeline,
    mars_scores,
    permutation_test,
    weight_row,
)
from .diagram import CliqueSet, DiagramOptions, cliques_from_pairs, cliques_from_threshold, render_cd_diagram  # noqa: E402
from .report import AnalysisReport, PairwiseResult  # noqa: E402
from .pipeline import analyze  # noqa: E402
from .scenarios import ScenarioSpec, generate_scenario  # noqa: E402
