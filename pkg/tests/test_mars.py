import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from marsrank.classic import nemenyi_cd, rank_row
from marsrank.errors import DomainError, ValidationError
from marsrank.mars import (
    mars_cd,
    mars_pipeline,
    mars_scores,
    mars_sigma,
    null_statistics,
    permutation_test,
    weight_matrix,
    weight_row,
)
from marsrank.matrix_io import PerformanceMatrix
from marsrank.rng import SplitMix64, stream_seed

from conftest import random_matrix


def fraction_weights(values):
    """Exact-arithmetic weights, written straight from the definition."""
    y = [Fraction(v) for v in values]
    hi, lo = max(y), min(y)
    if hi == lo:
        return [Fraction(1)] * len(y)
    above = sorted((hi - lo) / (v - lo) for v in y if v > lo)
    gaps = [b - a for a, b in zip(above, above[1:])]
    delta = above[0] if len(above) == 1 or above[0] == above[-1] else max(gaps)
    return [(hi - lo) / (v - lo) if v > lo else above[-1] + delta for v in y]


def recompute_null_statistic(values, seed, index):
    """Shuffle the raw values with the reference generator and rerun scoring."""
    gen = SplitMix64(stream_seed(seed, index))
    shuffled = np.array([gen.shuffle(list(row)) for row in values])
    _, scores = mars_scores(shuffled)
    return float(np.var(scores))


# metric values on a 1e-6 grid, like real accuracies
floats_row = st.lists(st.integers(0, 10**6).map(lambda i: i / 10**6), min_size=2, max_size=8)


class TestWeights:
    @pytest.mark.parametrize(
        "row, expected",
        [
            ((0.95, 0.50, 0.30), (1, 3.25, 5.5)),
            ((0.94, 0.95, 0.30), (1.015625, 1, 1.03125)),
            ((0.9, 0.4), (1, 2)),
            ((0.7, 0.7, 0.7), (1, 1, 1)),
        ],
    )
    def test_examples(self, row, expected):
        assert weight_row(row).tolist() == pytest.approx(expected, rel=1e-12)

    def test_tied_minimum_share_penalty(self):
        w = weight_row((0.9, 0.5, 0.1, 0.1))
        assert w[2] == w[3] == pytest.approx(2 + 1)

    def test_all_above_minimum_equal(self):
        # W = {1, 1}: delta defaults to w_(1) = 1
        assert weight_row((0.8, 0.8, 0.2)).tolist() == [1, 1, 2]

    @given(floats_row)
    def test_against_fraction_oracle(self, row):
        expected = [float(w) for w in fraction_weights(row)]
        assert weight_row(row).tolist() == pytest.approx(expected, rel=1e-9)

    @given(floats_row)
    def test_floor_and_max(self, row):
        w = weight_row(row)
        assert np.all(w >= 1)
        assert np.all(w[np.asarray(row) == max(row)] == 1)

    @given(floats_row)
    def test_strict_penalty_unique_minimum(self, row):
        y = np.asarray(row)
        lo = y.min()
        if np.count_nonzero(y == lo) == 1 and np.unique(y).size >= 2:
            w = weight_row(y)
            i = int(np.argmin(y))
            assert np.all(w[i] > np.delete(w, i))

    @given(floats_row, st.floats(0.01, 100), st.floats(-10, 10))
    def test_affine_invariance(self, row, a, b):
        y = np.asarray(row)
        if np.unique(y).size < 2 or np.ptp(y) < 1e-3:
            return
        assert weight_row(a * y + b) == pytest.approx(weight_row(y), rel=1e-6)

    @given(st.lists(st.integers(1, 999), min_size=3, max_size=7, unique=True), st.data())
    def test_monotone_penalty(self, ints, data):
        y = np.sort(np.array(ints) / 1000)[::-1]
        j = data.draw(st.integers(1, len(y) - 2))
        # lower method j toward its lower neighbour without crossing it
        lowered = y.copy()
        lowered[j] = data.draw(st.floats(y[j + 1] + 1e-6, y[j]))
        assert weight_row(lowered)[j] >= weight_row(y)[j]

    def test_overflow_is_rejected(self):
        with pytest.raises(DomainError):
            weight_row((0.0, 1.0, 1e-320))

    def test_weight_matrix_rows(self):
        v = [[0.95, 0.5, 0.3], [0.94, 0.95, 0.3]]
        np.testing.assert_array_equal(weight_matrix(v)[1], weight_row(v[1]))


class TestScores:
    def test_scenario1(self, scenarios):
        wrm, scores = mars_scores(scenarios[1])
        assert scores.tolist() == pytest.approx([1.515625, 3.75, 9.796875], abs=1e-12)
        assert wrm.weighted_ranks[0].tolist() == pytest.approx([1, 6.5, 16.5], rel=1e-12)
        assert wrm.weighted_ranks[39].tolist() == pytest.approx([2.03125, 1, 3.09375], rel=1e-12)

    def test_scenario2(self, scenarios):
        assert mars_scores(scenarios[2])[1].tolist() == pytest.approx([22.5, 1.775, 66.825], abs=1e-9)

    def test_scenario3(self, scenarios):
        assert mars_scores(scenarios[3])[1].tolist() == pytest.approx([2.5, 3.5, 6.0], abs=1e-12)

    def test_scenario4(self, scenarios):
        assert mars_scores(scenarios[4])[1].tolist() == pytest.approx([1.7515015, 1.875, 2.8795045], abs=1e-6)

    def test_scenario5(self, scenarios):
        assert mars_scores(scenarios[5])[1].tolist() == pytest.approx([7.0, 8.9, 17.7], abs=1e-9)

    def test_constant(self, constant_matrix):
        assert mars_scores(constant_matrix)[1].tolist() == [2, 2, 2]

    def test_fraction_oracle_on_random_matrices(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            v = np.round(rng.random((int(rng.integers(1, 12)), int(rng.integers(2, 7)))), 2)
            expected = np.mean(
                [[float(r * w) for r, w in zip(rank_row(row), fraction_weights(row))] for row in v], axis=0
            )
            assert mars_scores(v)[1] == pytest.approx(expected, rel=1e-12)

    def test_score_floor_and_dominance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            v = rng.random((int(rng.integers(1, 20)), int(rng.integers(2, 7))))
            v[:, 0] = v.max(axis=1) + 0.1
            scores = mars_scores(v)[1]
            assert scores[0] == 1.0
            assert np.all(scores >= 1)
            assert np.argmin(scores) == 0 and np.all(scores[1:] > 1)

    def test_column_and_row_equivariance(self):
        rng = np.random.default_rng(8)
        v = rng.random((15, 5))
        cols, rows = rng.permutation(5), rng.permutation(15)
        base = mars_scores(v)[1]
        assert mars_scores(v[:, cols])[1] == pytest.approx(base[cols], rel=1e-12)
        assert mars_scores(v[rows])[1] == pytest.approx(base, rel=1e-12)

    def test_lower_is_better(self):
        m = PerformanceMatrix(("a", "b", "c"), ("d",), [[0.05, 0.5, 0.7]], "lower")
        assert mars_scores(m)[1].tolist() == pytest.approx(mars_scores([[-0.05, -0.5, -0.7]])[1].tolist())


class TestCD:
    def test_scenario1_pooled(self, scenarios):
        wrm, _ = mars_scores(scenarios[1])
        assert mars_sigma(wrm) == pytest.approx(5.46115, abs=1e-5)
        assert mars_cd(wrm, 3, 40) == pytest.approx(3.5042, abs=1e-3)

    def test_scenario1_method_scores(self, scenarios):
        wrm, _ = mars_scores(scenarios[1])
        # population std of (1.515625, 3.75, 9.796875)
        assert mars_sigma(wrm, "method_scores") == pytest.approx(3.498194, abs=1e-6)
        assert mars_cd(wrm, 3, 40, sigma_mode="method_scores") == pytest.approx(2.2448, abs=1e-3)

    def test_scenario3_pooled(self, scenarios):
        wrm, _ = mars_scores(scenarios[3])
        assert mars_sigma(wrm) == pytest.approx(2 * math.sqrt(2), rel=1e-12)
        assert mars_cd(wrm, 3, 40) == pytest.approx(1.8154, abs=1e-3)

    def test_constant(self, constant_matrix):
        wrm, _ = mars_scores(constant_matrix)
        assert mars_sigma(wrm) == 0.0 and mars_cd(wrm, 3, 4) == 0.0

    @pytest.mark.parametrize("mode", ["pooled", "method_scores"])
    def test_ratio_identity(self, mode):
        rng = np.random.default_rng(9)
        for _ in range(50):
            n, k = int(rng.integers(2, 30)), int(rng.integers(2, 10))
            wrm, _ = mars_scores(rng.random((n, k)))
            ratio = mars_cd(wrm, k, n, 0.05, mode) / nemenyi_cd(k, n, 0.05)
            assert ratio == pytest.approx(mars_sigma(wrm, mode) / math.sqrt((k * k - 1) / 12), rel=1e-12)

    def test_unknown_mode(self, scenarios):
        wrm, _ = mars_scores(scenarios[1])
        with pytest.raises(ValidationError):
            mars_sigma(wrm, "sample")

    def test_affine_invariance_of_scores_and_cd(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            v = rng.random((int(rng.integers(2, 20)), int(rng.integers(2, 7))))
            a, b = rng.uniform(0.1, 50), rng.uniform(-5, 5)
            w1, s1 = mars_scores(v)
            w2, s2 = mars_scores(a * v + b)
            assert s2 == pytest.approx(s1, rel=1e-7)
            assert mars_cd(w2, v.shape[1], v.shape[0]) == pytest.approx(mars_cd(w1, v.shape[1], v.shape[0]), rel=1e-7)


class TestPermutation:
    def test_constant_matrix(self, constant_matrix):
        res = permutation_test(constant_matrix, rho=500, seed=1)
        assert res.observed_statistic == 0.0 and res.p_value == 1.0

    def test_scenario1_significant(self, scenarios):
        assert permutation_test(scenarios[1], rho=10_000, seed=42).p_value <= 0.001

    def test_deterministic(self, scenarios):
        a = permutation_test(scenarios[4], rho=2000, seed=3)
        b = permutation_test(scenarios[4], rho=2000, seed=3)
        assert a == b

    def test_workers_and_batches_do_not_matter(self, scenarios):
        ref = permutation_test(scenarios[3], rho=3000, seed=11)
        for workers, batch in [(4, None), (3, 7), (1, 1000), (8, 50)]:
            got = permutation_test(scenarios[3], rho=3000, seed=11, workers=workers, batch_size=batch)
            assert got.p_value == ref.p_value and got.exceed_count == ref.exceed_count

    def test_p_is_multiple_of_one_over_rho(self):
        rng = np.random.default_rng(12)
        for rho in (1, 7, 250):
            res = permutation_test(rng.random((6, 4)), rho=rho, seed=int(rng.integers(0, 2**63)))
            assert res.p_value * rho == pytest.approx(round(res.p_value * rho), abs=1e-9)
            assert res.exceed_count == round(res.p_value * rho)

    def test_null_statistics_match_full_recomputation(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            m = random_matrix(rng, int(rng.integers(2, 10)), int(rng.integers(2, 6)), levels=5)
            seed = int(rng.integers(0, 2**63))
            got = null_statistics(m, seed, range(40))
            expected = [recompute_null_statistic(m.values, seed, p) for p in range(40)]
            assert got.tolist() == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_null_statistics_non_contiguous(self, scenarios):
        a = null_statistics(scenarios[5], 4, [5, 2, 9])
        b = null_statistics(scenarios[5], 4, range(10))
        assert a.tolist() == [b[5], b[2], b[9]]

    @pytest.mark.parametrize("rho", [0, -3, 2.5, True])
    def test_bad_rho(self, scenarios, rho):
        with pytest.raises(DomainError):
            permutation_test(scenarios[1], rho=rho)


class TestPipeline:
    def test_scenario1(self, scenarios):
        rep = mars_pipeline(scenarios[1], rho=1000)
        assert rep.mars_scores == pytest.approx([1.515625, 3.75, 9.796875], abs=1e-12)
        assert all(p.rejected for p in rep.pairwise)
        assert rep.mars.cliques.cliques == ((0, 1),)
        assert rep.mars.global_test_role == "complementary"

    def test_scenario3_separates_b_and_c(self, scenarios):
        rep = mars_pipeline(scenarios[3], rho=100)
        assert rep.mars.cliques.cliques == ((0, 1),)

    def test_scenario2_holm_cliques(self, scenarios):
        rep = mars_pipeline(scenarios[2], rho=100, clique_source="holm")
        assert rep.mars.clique_source == "holm"
        rejected = {(p.method_a, p.method_b) for p in rep.pairwise if p.rejected}
        for clique in rep.mars.cliques.cliques:
            for i in clique:
                for j in clique:
                    assert (i, j) not in rejected

    def test_constant_matrix_single_clique(self, constant_matrix):
        rep = mars_pipeline(constant_matrix, rho=100)
        assert rep.mars.cliques.cliques == ((0, 1, 2),)
        assert rep.mars.global_test.p_value == 1.0
