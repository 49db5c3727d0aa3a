import numpy as np
import pytest
from django.test import SimpleTestCase

from pmlfsla.exceptions import ConfigError
from pmlfsla.factorization import FactorState
from pmlfsla.numerics import matmul, row_l2_norms
from pmlfsla.ranking import (
    DEFAULT_FRACTIONS,
    FeatureRanking,
    RankingMethod,
    budget_size,
    feature_budgets,
    random_ranking,
    score_q_only,
    score_qr,
    select_top,
)


def state_with(q_mat, r_mat):
    q_mat = np.asarray(q_mat, dtype=float)
    r_mat = np.asarray(r_mat, dtype=float)
    return FactorState(
        l_mat=np.ones((1, q_mat.shape[1])),
        q_mat=q_mat,
        p_mat=np.ones((1, q_mat.shape[1])),
        r_mat=r_mat,
        t_mat=np.ones((1, r_mat.shape[1])),
        d_diag=np.ones(q_mat.shape[0]),
    )


class TestScoreQr(SimpleTestCase):
    # Tests the hand-computed QR scores.
    def test_hand_example(self):
        """
        Given Q = [[2], [1]] and R = [[3, 4]]
        When the features are scored by QR
        Then the rows of QR are [6, 8] and [3, 4], scoring 10 and 5
        """
        # When
        ranking = score_qr(state_with([[2], [1]], [[3, 4]]))

        # Then
        np.testing.assert_allclose(ranking.scores, [10, 5])
        assert ranking.order.tolist() == [0, 1]
        assert ranking.method == RankingMethod.QR

    # Tests that all-zero scores fall back to identity order and are flagged in the log.
    def test_zero_q_ties(self):
        with self.assertLogs("pmlfsla.ranking", level="WARNING") as logs:
            ranking = score_qr(state_with(np.zeros((4, 2)), np.ones((2, 3))))

        assert "All 4 QR scores are zero" in logs.output[0]
        assert ranking.scores.tolist() == [0, 0, 0, 0]
        assert ranking.order.tolist() == [0, 1, 2, 3]

    # Tests that scaling R scales the scores and leaves the order unchanged.
    def test_scaling_r(self):
        rng = np.random.default_rng(0)
        q_mat, r_mat = rng.random((6, 3)), rng.random((3, 4))

        base = score_qr(state_with(q_mat, r_mat))
        scaled = score_qr(state_with(q_mat, 2.5 * r_mat))

        np.testing.assert_allclose(scaled.scores, 2.5 * base.scores)
        np.testing.assert_array_equal(scaled.order, base.order)

    # Tests that QR scores are exactly the row norms of the product.
    def test_matches_row_norm_oracle(self):
        rng = np.random.default_rng(1)
        q_mat, r_mat = rng.random((10, 3)), rng.random((3, 5))
        q_mat[4] = 0.0

        ranking = score_qr(state_with(q_mat, r_mat))

        np.testing.assert_array_equal(ranking.scores, row_l2_norms(matmul(q_mat, r_mat)))
        assert ranking.scores[4] == 0
        assert ranking.order[-1] == 4


class TestScoreQOnly(SimpleTestCase):
    # Tests the hand-computed Q scores.
    def test_hand_example(self):
        ranking = score_q_only(state_with([[0, 0], [3, 4]], np.ones((2, 2))))

        np.testing.assert_allclose(ranking.scores, [0, 5])
        assert ranking.order.tolist() == [1, 0]
        assert ranking.method == RankingMethod.Q_ONLY

    # Tests that permuting Q's columns leaves the scores unchanged.
    def test_column_permutation(self):
        q_mat = np.random.default_rng(2).random((5, 3))
        base = score_q_only(state_with(q_mat, np.ones((3, 2))))
        permuted = score_q_only(state_with(q_mat[:, [2, 0, 1]], np.ones((3, 2))))
        np.testing.assert_allclose(permuted.scores, base.scores)

    # Tests that an identity Q scores 1 everywhere in identity order.
    def test_identity(self):
        ranking = score_q_only(state_with(np.eye(3), np.ones((3, 2))))
        np.testing.assert_allclose(ranking.scores, [1, 1, 1])
        assert ranking.order.tolist() == [0, 1, 2]


class TestSelection(SimpleTestCase):
    def ranking(self, d):
        return FeatureRanking.from_scores(np.arange(d, 0, -1, dtype=float), RankingMethod.QR)

    # Tests the budget sizes for representative dimensions and fractions.
    def test_select_top(self):
        """
        Given rankings over 100, 16 and 10 features
        When the top 20%, 100% and 1% are selected
        Then 20, 16 and 1 features are returned in ranking order
        """
        assert len(select_top(self.ranking(100), 0.2)) == 20
        assert select_top(self.ranking(16), 1.0).tolist() == list(range(16))
        assert select_top(self.ranking(10), 0.01).tolist() == [0]

    # Tests that budgets absorb floating point representation error.
    def test_budget_size_rounding(self):
        assert budget_size(100, 0.29) == 29
        assert budget_size(49, 0.2) == 9

    # Tests that fractions outside (0, 1] are config errors.
    def test_rejects_fraction(self):
        with pytest.raises(ConfigError):
            select_top(self.ranking(10), 0.0)
        with pytest.raises(ConfigError):
            select_top(self.ranking(10), 1.5)

    # Tests that small datasets sweep every absolute feature count.
    def test_feature_budgets(self):
        water = feature_budgets(16)

        assert [budget_size(16, fraction) for fraction in water] == list(range(1, 17))
        assert feature_budgets(103) == list(DEFAULT_FRACTIONS)
        assert DEFAULT_FRACTIONS[0] == 0.01 and DEFAULT_FRACTIONS[-1] == 0.2 and len(DEFAULT_FRACTIONS) == 20

    # Tests that ties in score break by ascending feature index.
    def test_tie_break(self):
        ranking = FeatureRanking.from_scores([1.0, 3.0, 1.0, 3.0], RankingMethod.QR)
        assert ranking.order.tolist() == [1, 3, 0, 2]

    # Tests that random rankings are seeded permutations.
    def test_random_ranking(self):
        first = random_ranking(30, seed=4)
        assert sorted(first.order.tolist()) == list(range(30))
        np.testing.assert_array_equal(first.order, random_ranking(30, seed=4).order)
        assert first.method == RankingMethod.RANDOM
