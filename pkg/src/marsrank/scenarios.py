"""Synthetic benchmark matrices: five fixed block designs and one noisy competition.

Scenarios 1-5 repeat one result row per block of datasets.  Scenario 6 adds
a per-dataset difficulty shift (sd 0.05, shared by all methods) and a
per-(dataset, method) term (sd 0.02) to fixed base accuracies, drawing from
SplitMix64 in dataset-major order (g_0, e_0_0..e_0_7, g_1, ...), and clamps
the result to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownScenario
from .kernel import inverse_normal_cdf
from .matrix_io import PerformanceMatrix
from .rng import SplitMix64

N_DATASETS = 40

# (method names, [(number of datasets, row values), ...])
_BLOCKS: dict[int, tuple[tuple[str, ...], list[tuple[int, tuple[float, ...]]]]] = {
    1: (("Method A", "Method B", "Method C"), [(20, (0.95, 0.50, 0.30)), (20, (0.94, 0.95, 0.30))]),
    2: (("Method A", "Method B", "Method C"), [(30, (0.81, 0.80, 0.20)), (10, (0.10, 0.95, 0.08))]),
    3: (("Steady A", "Volatile B", "Method C"), [(20, (0.70, 0.90, 0.50)), (20, (0.70, 0.10, 0.50))]),
    4: (("Method A", "Method B", "Method C"), [(30, (0.8499, 0.8500, 0.7500)), (10, (0.90, 0.15, 0.75))]),
    5: (("Method A", "Method B", "Method C"), [(30, (0.950, 0.951, 0.952)), (10, (0.940, 0.400, 0.350))]),
}

SCENARIO6_BASE: dict[str, float] = {
    "Method A": 0.92,
    "Method B": 0.90,
    "Method C": 0.89,
    "Method D": 0.85,
    "Method E": 0.82,
    "Method F": 0.78,
    "Method G": 0.75,
    "Baseline": 0.60,
}
DATASET_SD = 0.05
METHOD_SD = 0.02

SCENARIO_TITLES = {
    1: "Magnitude of performance",
    2: "Consistency and robustness",
    3: "Stability against volatility",
    4: "Noisy superiority",
    5: "The survivor",
    6: "Realistic competition",
}


@dataclass(frozen=True)
class ScenarioSpec:
    id: int
    seed: int = 42
    n_datasets: int = N_DATASETS

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, int) or self.id not in SCENARIO_TITLES:
            raise UnknownScenario(f"scenario id must be 1..6, got {self.id!r}")


def _dataset_names(n: int) -> tuple[str, ...]:
    return tuple(f"D{i}" for i in range(n))


def _block_matrix(sid: int) -> PerformanceMatrix:
    methods, blocks = _BLOCKS[sid]
    rows = [row for count, row in blocks for _ in range(count)]
    return PerformanceMatrix(methods, _dataset_names(len(rows)), np.array(rows, dtype=np.float64))


def _noisy_matrix(seed: int, n: int) -> PerformanceMatrix:
    rng = SplitMix64(seed)
    methods = tuple(SCENARIO6_BASE)
    base = np.array([SCENARIO6_BASE[m] for m in methods])
    values = np.empty((n, len(methods)))
    for d in range(n):
        shift = DATASET_SD * inverse_normal_cdf(rng.uniform01())
        for m in range(len(methods)):
            values[d, m] = base[m] + shift + METHOD_SD * inverse_normal_cdf(rng.uniform01())
    return PerformanceMatrix(methods, _dataset_names(n), np.clip(values, 0.0, 1.0))


def generate_scenario(spec: "ScenarioSpec | int", seed: int | None = None) -> PerformanceMatrix:
    """Build the performance matrix of one scenario.

    ``spec`` may be a ScenarioSpec or a bare id; ``seed`` only matters for
    scenario 6.
    """
    if not isinstance(spec, ScenarioSpec):
        spec = ScenarioSpec(spec, 42 if seed is None else seed)
    elif seed is not None:
        spec = ScenarioSpec(spec.id, seed, spec.n_datasets)
    if spec.id == 6:
        return _noisy_matrix(spec.seed, spec.n_datasets)
    return _block_matrix(spec.id)
