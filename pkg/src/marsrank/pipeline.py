"""Run one or both pipelines on a matrix and assemble a single report."""

from __future__ import annotations

from .classic import pairwise_wilcoxon_holm, standard_section
from .errors import ValidationError
from .kernel import table_alpha
from .mars import _sigma_mode, mars_section
from .matrix_io import PerformanceMatrix
from .report import AnalysisReport

MODES = ("standard", "mars", "both")


def analyze(
    matrix: PerformanceMatrix,
    mode: str = "both",
    alpha: float = 0.05,
    rho: int = 10_000,
    seed: int = 42,
    sigma_mode: str = "pooled",
    clique_source: str = "cd",
    standard_clique_source: str = "holm",
    gate: bool = True,
    workers: int = 1,
) -> AnalysisReport:
    """Analyse ``matrix`` with the requested pipeline(s).

    In ``both`` mode the Wilcoxon-Holm pairs are computed once and shared.
    The standard section honours the Friedman gate; the MARS section always
    carries pairwise results.
    """
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    alpha = table_alpha(alpha)
    run_std = mode in ("standard", "both")
    run_mars = mode in ("mars", "both")

    pairwise = pairwise_wilcoxon_holm(matrix, alpha) if run_mars else None
    standard = None
    if run_std:
        standard, used = standard_section(matrix, alpha, pairwise, gate, standard_clique_source)
        if pairwise is None and standard.posthoc == "run":
            pairwise = used if used is not None else pairwise_wilcoxon_holm(matrix, alpha)
    mars = None
    if run_mars:
        mars = mars_section(matrix, alpha, pairwise, rho, seed, sigma_mode, clique_source, workers)

    config = {"direction": matrix.direction.value}
    if run_std:
        config["friedman_gate"] = gate
        config["standard_clique_source"] = standard_clique_source
    if run_mars:
        config.update(
            sigma_mode=_sigma_mode(sigma_mode),
            clique_source=clique_source,
            rho=int(rho),
            seed=int(seed),
        )
    return AnalysisReport(
        mode=mode,
        alpha=alpha,
        k=matrix.k,
        n_datasets=matrix.n_datasets,
        method_names=list(matrix.method_names),
        config=config,
        standard=standard,
        mars=mars,
        pairwise=pairwise,
    )
