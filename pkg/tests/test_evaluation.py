import numpy as np
import pandas as pd
import pytest
from django.test import SimpleTestCase
from sklearn.metrics import coverage_error, label_ranking_average_precision_score, label_ranking_loss

from pmlfsla.evaluation import (
    CLASSIFIER,
    METRICS,
    MetricsReport,
    evaluate_selection,
    label_ranks,
    macro_f1,
    micro_f1,
    ranking_metrics,
    robustness_spread,
    train_predict,
)
from pmlfsla.exceptions import ConfigError


def pairwise_oracle(scores, truth):
    """Average precision, ranking loss and normalized coverage by explicit enumeration"""
    precisions, losses, coverages = [], [], []
    n_labels = scores.shape[1]
    for row_scores, relevant in zip(scores, truth.astype(bool)):
        if relevant.all() or not relevant.any():
            continue
        rank = {j: 1 + sum(row_scores[i] > row_scores[j] for i in range(n_labels)) for j in range(n_labels)}
        positives = [j for j in range(n_labels) if relevant[j]]
        negatives = [j for j in range(n_labels) if not relevant[j]]
        precisions.append(
            np.mean([sum(rank[i] <= rank[j] for i in positives) / rank[j] for j in positives])
        )
        losses.append(np.mean([row_scores[p] <= row_scores[q] for p in positives for q in negatives]))
        coverages.append((max(rank[j] for j in positives) - 1) / n_labels)
    return np.mean(precisions), np.mean(losses), np.mean(coverages)


class TestF1(SimpleTestCase):
    # Tests the pooled and per-label hand counts.
    def test_hand_example(self):
        """
        Given label 1 with TP=1, FP=1, FN=0 and label 2 with TP=0, FP=0, FN=1
        When micro and macro F1 are computed
        Then micro is 2/(2+1+1) = 0.5 and macro is (2/3 + 0)/2 = 1/3
        """
        # Given
        truth = np.array([[1, 0], [0, 1]])
        pred = np.array([[1, 0], [1, 0]])

        # Then
        assert micro_f1(pred, truth) == pytest.approx(0.5, abs=1e-12)
        assert macro_f1(pred, truth) == pytest.approx(1 / 3, abs=1e-12)

    # Tests perfect and empty predictions.
    def test_extremes(self):
        truth = np.array([[1, 0, 1], [0, 1, 0]])
        assert micro_f1(truth, truth) == 1.0
        assert macro_f1(truth, truth) == 1.0
        assert micro_f1(np.zeros_like(truth), truth) == 0.0
        assert macro_f1(np.zeros_like(truth), truth) == 0.0

    # Tests that micro and macro F1 coincide when every label has the same confusion counts.
    def test_identical_confusion_counts(self):
        truth = np.array([[1, 1], [0, 0], [1, 1]])
        pred = np.array([[1, 1], [1, 1], [0, 0]])
        assert micro_f1(pred, truth) == pytest.approx(macro_f1(pred, truth))

    # Tests that a single label column is scored on its positives only.
    def test_single_label(self):
        """
        Given one label column with a single positive
        When the all-zero prediction and a half-right prediction are scored
        Then both F1 variants are 0 for the empty prediction and 2/3 for TP=1, FP=1, FN=0
        """
        # Given
        truth = np.array([[1], [0], [0], [0]])

        # Then
        assert micro_f1(np.zeros_like(truth), truth) == 0.0
        assert macro_f1(np.zeros_like(truth), truth) == 0.0
        half = np.array([[1], [1], [0], [0]])
        assert micro_f1(half, truth) == pytest.approx(2 / 3)
        assert macro_f1(half, truth) == pytest.approx(2 / 3)


class TestRankingMetrics(SimpleTestCase):
    # Tests the single-pair worked example.
    def test_two_label_example(self):
        """
        Given truth [1, 0] and scores [0.1, 0.9]
        When the ranking metrics are computed
        Then ranking loss is 1, coverage (2-1)/2 = 0.5 and average precision 0.5
        """
        metrics = ranking_metrics(np.array([[0.1, 0.9]]), np.array([[1, 0]]))

        assert metrics.ranking_loss == pytest.approx(1.0, abs=1e-12)
        assert metrics.coverage == pytest.approx(0.5, abs=1e-12)
        assert metrics.average_precision == pytest.approx(0.5, abs=1e-12)
        assert metrics.excluded == 0

    # Tests the three-label worked example.
    def test_three_label_example(self):
        metrics = ranking_metrics(np.array([[0.9, 0.8, 0.1]]), np.array([[1, 1, 0]]))

        assert metrics.average_precision == pytest.approx(1.0, abs=1e-12)
        assert metrics.ranking_loss == pytest.approx(0.0, abs=1e-12)
        assert metrics.coverage == pytest.approx(1 / 3, abs=1e-12)

    # Tests agreement with pair enumeration and scikit-learn on random tie-free scores.
    def test_matches_oracles(self):
        """
        Given 100 random 5-label score matrices without ties
        When the ranking metrics are computed
        Then they match explicit pair enumeration to 1e-10, and scikit-learn's ranking
        loss, average precision and (coverage - 1) / l on non-degenerate rows
        """
        rng = np.random.default_rng(42)
        for _ in range(100):
            # Given
            scores = rng.random((12, 5))
            truth = (rng.random((12, 5)) < 0.4).astype(int)
            truth[:, 0] = 1
            truth[:, 4] = 0

            # When
            metrics = ranking_metrics(scores, truth)

            # Then
            ap, rl, cov = pairwise_oracle(scores, truth)
            assert metrics.average_precision == pytest.approx(ap, abs=1e-10)
            assert metrics.ranking_loss == pytest.approx(rl, abs=1e-10)
            assert metrics.coverage == pytest.approx(cov, abs=1e-10)
            assert metrics.ranking_loss == pytest.approx(label_ranking_loss(truth, scores), abs=1e-10)
            assert metrics.average_precision == pytest.approx(
                label_ranking_average_precision_score(truth, scores), abs=1e-10
            )
            assert metrics.coverage == pytest.approx((coverage_error(truth, scores) - 1) / 5, abs=1e-10)

    # Tests that rank-based metrics are invariant under a strictly increasing transform.
    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(3)
        scores = rng.random((20, 6))
        truth = (rng.random((20, 6)) < 0.5).astype(int)

        assert ranking_metrics(np.exp(3 * scores) - 7, truth) == ranking_metrics(scores, truth)

    # Tests that tied scores count as misordered pairs and ranks break ties by label index.
    def test_ties(self):
        metrics = ranking_metrics(np.array([[0.5, 0.5, 0.1]]), np.array([[0, 1, 0]]))

        assert label_ranks(np.array([[0.5, 0.5, 0.1]])).tolist() == [[1, 2, 3]]
        assert metrics.ranking_loss == pytest.approx(0.5)
        assert metrics.average_precision == pytest.approx(0.5)

    # Tests that degenerate rows are excluded and counted.
    def test_degenerate_rows_excluded(self):
        scores = np.array([[0.9, 0.1], [0.3, 0.2], [0.5, 0.6]])
        truth = np.array([[1, 0], [1, 1], [0, 0]])

        metrics = ranking_metrics(scores, truth)

        assert metrics.excluded == 2
        assert metrics.ranking_loss == 0.0

    # Tests that all-degenerate input yields NaN with a warning.
    def test_all_degenerate(self):
        with self.assertLogs("pmlfsla.evaluation", level="WARNING"):
            metrics = ranking_metrics(np.array([[0.3, 0.2]]), np.array([[1, 1]]))
        assert np.isnan(metrics.average_precision)
        assert np.isnan(metrics.coverage)
        assert metrics.excluded == 1


class TestTrainPredict(SimpleTestCase):
    def setUp(self):
        self.train_x = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        self.train_y = np.array([[1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 1, 0]])

    # Tests that a training instance is predicted correctly on separable toy data.
    def test_separable_toy(self):
        """
        Given four instances whose label is decided by which feature is set
        When the classifier scores copies of two training instances
        Then each copy is predicted with its training labels and the unused label is 0
        """
        # When
        predicted = train_predict(self.train_x, self.train_y, self.train_x[:2], [0, 1])

        # Then
        assert predicted.predictions.tolist() == [[1, 0, 0], [0, 1, 0]]
        np.testing.assert_allclose(predicted.scores[:, 2], 0.0, atol=1e-12)

    # Tests that duplicating a selected feature leaves the predictions unchanged.
    def test_duplicated_feature(self):
        single = train_predict(self.train_x, self.train_y, self.train_x, [0, 1])
        duplicated = train_predict(self.train_x, self.train_y, self.train_x, [0, 1, 0])

        np.testing.assert_array_equal(duplicated.predictions, single.predictions)
        assert np.all(np.isfinite(duplicated.scores))

    # Tests that an empty selection is a config error.
    def test_empty_selection(self):
        with pytest.raises(ConfigError):
            train_predict(self.train_x, self.train_y, self.train_x, [])

    # Tests that a selection is scored on all five metrics.
    def test_evaluate_selection(self):
        truth = np.array([[1, 0, 1], [0, 1, 1], [1, 0, 1], [0, 1, 1]])
        values = evaluate_selection(self.train_x, truth, self.train_x, truth, [0, 1])

        assert set(values) == set(METRICS) | {"excluded_rows"}
        assert values["micro_f1"] == 1.0
        assert values["ranking_loss"] == 0.0
        for metric in METRICS:
            assert 0.0 <= values[metric] <= 1.0


class TestMetricsReport(SimpleTestCase):
    def setUp(self):
        rows = []
        for method, offset in (("QR", 0.2), ("Q_ONLY", 0.0)):
            for fraction, base in ((0.1, 0.4), (0.2, 0.6)):
                for fold, wobble in enumerate((-0.1, 0.1)):
                    for metric in METRICS:
                        rows.append(("toy", method, fraction, fold, metric, base + offset + wobble))
        records = pd.DataFrame(rows, columns=["dataset", "method", "fraction", "fold", "metric", "value"])
        excluded = pd.DataFrame([("toy", "QR", 0.1, 0, 3)], columns=["dataset", "method", "fraction", "fold", "excluded_rows"])
        self.report = MetricsReport(dataset="toy", records=records, excluded=excluded)

    # Tests that fold aggregates use the population standard deviation.
    def test_summary(self):
        summary = self.report.summary()
        row = summary[(summary["method"] == "QR") & (summary["fraction"] == 0.1) & (summary["metric"] == "micro_f1")]

        assert len(summary) == 2 * 2 * len(METRICS)
        assert row["mean"].iloc[0] == pytest.approx(0.6)
        assert row["std"].iloc[0] == pytest.approx(0.1)

    # Tests that the overall figures aggregate the per-fraction means.
    def test_overall(self):
        assert self.report.mean_of("QR", "macro_f1") == pytest.approx(0.7)
        assert self.report.mean_of("Q_ONLY", "macro_f1") == pytest.approx(0.5)
        overall = self.report.overall()
        assert overall["std"].iloc[0] == pytest.approx(0.1)

    # Tests the shape of the ablation comparison table.
    def test_comparison(self):
        table = self.report.comparison()

        assert list(table.columns) == ["metric", "method", "toy", "toy_std"]
        assert set(table["metric"]) == {"micro_f1", "macro_f1"}
        assert len(table) == 4

    # Tests that the JSON summary carries the classifier and excluded row count.
    def test_to_summary(self):
        payload = self.report.to_summary()

        assert payload["classifier"] == CLASSIFIER
        assert payload["excluded_rows"] == 3
        assert payload["methods"]["QR"]["micro_f1"]["mean"] == pytest.approx(0.7)
        assert len(payload["per_fraction"]) == 2 * 2 * len(METRICS)


class TestRobustnessSpread(SimpleTestCase):
    # Tests that a spread at or above the limit is logged as a warning.
    def test_warns_on_large_spread(self):
        grid = pd.DataFrame(
            [
                ("alpha", 0.01, "QR", "ranking_loss", 0.20, 0.0),
                ("alpha", 100.0, "QR", "ranking_loss", 0.40, 0.0),
                ("beta", 0.01, "QR", "ranking_loss", 0.20, 0.0),
                ("beta", 100.0, "QR", "ranking_loss", 0.25, 0.0),
            ],
            columns=["parameter", "value", "method", "metric", "mean", "std"],
        )

        with self.assertLogs("pmlfsla.evaluation", level="WARNING") as logs:
            spreads = robustness_spread(grid)

        assert spreads == pytest.approx({"alpha": 0.2, "beta": 0.05})
        assert len(logs.output) == 1
        assert "alpha" in logs.output[0]
