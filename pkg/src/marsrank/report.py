"""Analysis report: the machine-readable result of either pipeline.

Sections for a pipeline that did not run are left out entirely, both on the
dataclass (``None``) and in the JSON document (key absent).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import __version__
from .diagram import CliqueSet
from .errors import InvariantViolation, MalformedInput

__all__ = [
    "GlobalTest",
    "PairwiseResult",
    "StandardSection",
    "MarsSection",
    "AnalysisReport",
]


def _drop_none(d: dict) -> dict:
    return {key: value for key, value in d.items() if value is not None}


@dataclass(frozen=True)
class GlobalTest:
    name: str
    statistic: float
    p_value: float
    reject: bool
    df: int | None = None
    rho: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return _drop_none(
            {
                "name": self.name,
                "statistic": self.statistic,
                "p_value": self.p_value,
                "reject": self.reject,
                "df": self.df,
                "rho": self.rho,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> "GlobalTest":
        return cls(d["name"], d["statistic"], d["p_value"], d["reject"], d.get("df"), d.get("rho"), d.get("seed"))


@dataclass(frozen=True)
class PairwiseResult:
    """One Wilcoxon signed-rank comparison with its Holm step-down decision."""

    method_a: int
    method_b: int
    p_raw: float
    holm_rank: int
    holm_threshold: float
    rejected: bool

    def to_dict(self) -> dict:
        return {
            "method_a": self.method_a,
            "method_b": self.method_b,
            "p_raw": self.p_raw,
            "holm_rank": self.holm_rank,
            "holm_threshold": self.holm_threshold,
            "rejected": self.rejected,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairwiseResult":
        return cls(**{key: d[key] for key in cls.__dataclass_fields__})


@dataclass(frozen=True)
class StandardSection:
    avg_ranks: list[float]
    cd_standard: float
    global_test: GlobalTest
    posthoc: str  # "run" or "skipped"
    clique_source: str
    cliques: CliqueSet

    def to_dict(self) -> dict:
        return {
            "avg_ranks": list(self.avg_ranks),
            "cd_standard": self.cd_standard,
            "global_test": self.global_test.to_dict(),
            "posthoc": self.posthoc,
            "clique_source": self.clique_source,
            "cliques": self.cliques.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StandardSection":
        return cls(
            list(d["avg_ranks"]),
            d["cd_standard"],
            GlobalTest.from_dict(d["global_test"]),
            d["posthoc"],
            d["clique_source"],
            CliqueSet.from_dict(d["cliques"]),
        )


@dataclass(frozen=True)
class MarsSection:
    mars_scores: list[float]
    sigma: float
    sigma_mode: str
    cd_mars: float
    global_test: GlobalTest
    clique_source: str
    cliques: CliqueSet
    # the permutation p-value never gates the pairwise section
    global_test_role: str = "complementary"

    def to_dict(self) -> dict:
        return {
            "mars_scores": list(self.mars_scores),
            "sigma": self.sigma,
            "sigma_mode": self.sigma_mode,
            "cd_mars": self.cd_mars,
            "global_test": self.global_test.to_dict(),
            "global_test_role": self.global_test_role,
            "clique_source": self.clique_source,
            "cliques": self.cliques.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarsSection":
        return cls(
            list(d["mars_scores"]),
            d["sigma"],
            d["sigma_mode"],
            d["cd_mars"],
            GlobalTest.from_dict(d["global_test"]),
            d["clique_source"],
            CliqueSet.from_dict(d["cliques"]),
            d.get("global_test_role", "complementary"),
        )


@dataclass(frozen=True)
class AnalysisReport:
    mode: str
    alpha: float
    k: int
    n_datasets: int
    method_names: list[str]
    config: dict
    standard: StandardSection | None = None
    mars: MarsSection | None = None
    pairwise: list[PairwiseResult] | None = None
    tool_version: str = field(default=__version__)

    # convenience accessors mirroring the flat field names
    @property
    def avg_ranks(self):
        return None if self.standard is None else self.standard.avg_ranks

    @property
    def mars_scores(self):
        return None if self.mars is None else self.mars.mars_scores

    @property
    def cd_standard(self):
        return None if self.standard is None else self.standard.cd_standard

    @property
    def cd_mars(self):
        return None if self.mars is None else self.mars.cd_mars

    def rejection_matrix(self) -> list[list[bool]]:
        rej = [[False] * self.k for _ in range(self.k)]
        for pr in self.pairwise or ():
            rej[pr.method_a][pr.method_b] = rej[pr.method_b][pr.method_a] = pr.rejected
        return rej

    def to_dict(self) -> dict:
        doc = {
            "tool_version": self.tool_version,
            "mode": self.mode,
            "alpha": self.alpha,
            "k": self.k,
            "n_datasets": self.n_datasets,
            "method_names": list(self.method_names),
        }
        if self.standard is not None:
            doc["standard"] = self.standard.to_dict()
        if self.mars is not None:
            doc["mars"] = self.mars.to_dict()
        if self.pairwise is not None:
            doc["pairwise"] = [p.to_dict() for p in self.pairwise]
        doc["config"] = dict(self.config)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        try:
            return cls(
                mode=d["mode"],
                alpha=d["alpha"],
                k=d["k"],
                n_datasets=d["n_datasets"],
                method_names=list(d["method_names"]),
                config=dict(d["config"]),
                standard=StandardSection.from_dict(d["standard"]) if "standard" in d else None,
                mars=MarsSection.from_dict(d["mars"]) if "mars" in d else None,
                pairwise=[PairwiseResult.from_dict(p) for p in d["pairwise"]] if "pairwise" in d else None,
                tool_version=d.get("tool_version", __version__),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"not an analysis report: {exc!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"report is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise MalformedInput("report must be a JSON object")
        return cls.from_dict(doc)

    def check_invariants(self) -> None:
        """Raise InvariantViolation if the report is internally inconsistent."""
        k = self.k
        if len(self.method_names) != k:
            raise InvariantViolation("method_names length differs from k")
        if self.standard is not None:
            total = sum(self.standard.avg_ranks)
            if not math.isclose(total, k * (k + 1) / 2, rel_tol=1e-9):
                raise InvariantViolation(f"average ranks sum to {total}, expected {k * (k + 1) / 2}")
            _check_p(self.standard.global_test.p_value)
        if self.mars is not None:
            if min(self.mars.mars_scores) < 1.0 - 1e-9:
                raise InvariantViolation("a MARS score fell below 1")
            if (self.mars.cd_mars == 0) != (self.mars.sigma == 0):
                raise InvariantViolation("CD_MARS is zero exactly when sigma is zero")
            _check_p(self.mars.global_test.p_value)
        if self.pairwise is not None:
            if len(self.pairwise) != k * (k - 1) // 2:
                raise InvariantViolation("pairwise section does not cover every pair")
            ordered = sorted(self.pairwise, key=lambda p: p.holm_rank)
            seen_retained = False
            for pr in ordered:
                _check_p(pr.p_raw)
                if pr.rejected and (seen_retained or pr.p_raw > pr.holm_threshold):
                    raise InvariantViolation("Holm rejections are not a prefix of the sorted p-values")
                seen_retained = seen_retained or not pr.rejected


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise InvariantViolation(f"p-value {p} outside [0, 1]")
