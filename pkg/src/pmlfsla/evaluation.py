"""
Downstream evaluation of selected feature subsets: a binary-relevance ridge classifier,
the five multi-label metrics and the cross-validated benchmark built on them
"""
import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.linear_model import Ridge
from sklearn.metrics import f1_score

from .data import FoldPlan, PmlDataset
from .exceptions import ConfigError
from .factorization import HyperParams, fit
from .optics import OpticsParams, latent_dim
from .ranking import SCORERS, FeatureRanking, RankingMethod, random_ranking, select_top

logger = logging.getLogger(__name__)

RIDGE_LAMBDA = 1e-2
DECISION_THRESHOLD = 0.5
CLASSIFIER = f"binary-relevance ridge regression (lambda={RIDGE_LAMBDA}, threshold={DECISION_THRESHOLD})"

METRICS = ("micro_f1", "macro_f1", "average_precision", "ranking_loss", "coverage")
GRID_VALUES = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
ROBUSTNESS_LIMIT = 0.15


@dataclass(frozen=True, eq=False)
class LabelScores:
    scores: np.ndarray
    predictions: np.ndarray
    threshold: float = DECISION_THRESHOLD


class RankingMetrics(NamedTuple):
    average_precision: float
    ranking_loss: float
    coverage: float
    excluded: int


class BinaryRelevanceRidge:
    """
    One ridge regressor per label on the selected columns. sklearn's multi-output Ridge
    solves the labels independently against a shared Gram matrix, which is exactly the
    binary-relevance reduction
    """

    def __init__(self, alpha: float = RIDGE_LAMBDA):
        self.alpha = alpha
        self.model_ = None

    def fit(self, x: np.ndarray, y: np.ndarray) -> "BinaryRelevanceRidge":
        self.model_ = Ridge(alpha=self.alpha, solver="cholesky").fit(x, y)
        return self

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.model_.predict(x)).reshape(len(x), -1)


def train_predict(train_x, train_y, test_x, selected: Sequence[int]) -> LabelScores:
    selected = np.asarray(selected, dtype=np.int64)
    if not len(selected):
        raise ConfigError("At least one feature must be selected")
    model = BinaryRelevanceRidge().fit(np.asarray(train_x)[:, selected], np.asarray(train_y))
    scores = model.decision_function(np.asarray(test_x)[:, selected])
    return LabelScores(scores=scores, predictions=(scores >= DECISION_THRESHOLD).astype(np.int64))


def _f1(pred, truth, average: str) -> float:
    truth = np.asarray(truth, dtype=int).reshape(len(truth), -1)
    pred = np.asarray(pred, dtype=int).reshape(len(pred), -1)
    if truth.shape[1] == 1:
        # a single indicator column is scored on its positive class only
        return float(f1_score(truth[:, 0], pred[:, 0], average="binary", pos_label=1, zero_division=0))
    return float(f1_score(truth, pred, average=average, zero_division=0))


def micro_f1(pred, truth) -> float:
    return _f1(pred, truth, "micro")


def macro_f1(pred, truth) -> float:
    """Unweighted mean of per-label F1; a label with no true or predicted positives scores 0"""
    return _f1(pred, truth, "macro")


def label_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based rank of every label per row, larger score first, ties by label index"""
    scores = np.asarray(scores, dtype=np.float64)
    n, l = scores.shape  # noqa: E741
    index = np.broadcast_to(np.arange(l), (n, l))
    order = np.lexsort((index, -scores), axis=-1)
    ranks = np.empty((n, l), dtype=np.int64)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(1, l + 1), (n, l)), axis=1)
    return ranks


def ranking_metrics(scores, truth) -> RankingMetrics:
    """
    Average precision, ranking loss and normalized coverage over the rows that have at
    least one relevant and one irrelevant label
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth) > 0
    n_labels = scores.shape[1]
    ranks = label_ranks(scores)

    precisions, losses, coverages = [], [], []
    for row_scores, row_ranks, relevant in zip(scores, ranks, truth):
        n_relevant = int(relevant.sum())
        if n_relevant == 0 or n_relevant == n_labels:
            continue
        relevant_ranks = np.sort(row_ranks[relevant])
        precisions.append(np.mean(np.arange(1, n_relevant + 1) / relevant_ranks))
        misordered = row_scores[relevant][:, np.newaxis] <= row_scores[~relevant][np.newaxis, :]
        losses.append(misordered.mean())
        coverages.append((relevant_ranks[-1] - 1) / n_labels)

    excluded = len(truth) - len(precisions)
    if not precisions:
        logger.warning("All %d rows are all-relevant or all-irrelevant; ranking metrics are undefined", len(truth))
        return RankingMetrics(float("nan"), float("nan"), float("nan"), excluded)
    return RankingMetrics(float(np.mean(precisions)), float(np.mean(losses)), float(np.mean(coverages)), excluded)


def evaluate_selection(train_x, train_y, test_x, test_y, selected) -> Dict[str, float]:
    predicted = train_predict(train_x, train_y, test_x, selected)
    ranked = ranking_metrics(predicted.scores, test_y)
    return {
        "micro_f1": micro_f1(predicted.predictions, test_y),
        "macro_f1": macro_f1(predicted.predictions, test_y),
        "average_precision": ranked.average_precision,
        "ranking_loss": ranked.ranking_loss,
        "coverage": ranked.coverage,
        "excluded_rows": ranked.excluded,
    }


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """
    Long-form records (dataset, method, fraction, fold, metric, value) plus the number
    of degenerate test rows left out of the ranking metrics
    """

    dataset: str
    records: pd.DataFrame
    excluded: pd.DataFrame
    classifier: str = CLASSIFIER

    def summary(self) -> pd.DataFrame:
        """Mean and population std over folds, per method, fraction and metric"""
        grouped = self.records.groupby(["dataset", "method", "fraction", "metric"], sort=True)["value"]
        return pd.DataFrame({"mean": grouped.mean(), "std": grouped.std(ddof=0)}).reset_index()

    def overall(self) -> pd.DataFrame:
        """Mean and population std over the per-fraction means"""
        per_fraction = self.summary()
        grouped = per_fraction.groupby(["dataset", "method", "metric"], sort=True)["mean"]
        return pd.DataFrame({"mean": grouped.mean(), "std": grouped.std(ddof=0)}).reset_index()

    def mean_of(self, method: RankingMethod, metric: str) -> float:
        overall = self.overall()
        row = overall[(overall["method"] == RankingMethod(method).value) & (overall["metric"] == metric)]
        return float(row["mean"].iloc[0])

    def comparison(self) -> pd.DataFrame:
        """Micro-F1 and Macro-F1 per method, one mean and one std column per dataset"""
        overall = self.overall()
        overall = overall[overall["metric"].isin(["micro_f1", "macro_f1"])]
        table = overall.pivot_table(index=["metric", "method"], columns="dataset", values=["mean", "std"])
        table.columns = [name if stat == "mean" else f"{name}_std" for stat, name in table.columns]
        return table.reset_index()

    def to_summary(self) -> dict:
        overall = self.overall()
        methods = {}
        for row in overall.itertuples(index=False):
            methods.setdefault(row.method, {})[row.metric] = {"mean": row.mean, "std": row.std}
        per_fraction = [
            {"method": row.method, "fraction": row.fraction, "metric": row.metric, "mean": row.mean, "std": row.std}
            for row in self.summary().itertuples(index=False)
        ]
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "methods": methods,
            "per_fraction": per_fraction,
            "excluded_rows": int(self.excluded["excluded_rows"].sum()) if len(self.excluded) else 0,
        }


def _fold_rankings(
    partial: PmlDataset,
    train: np.ndarray,
    hp: HyperParams,
    methods: Iterable[RankingMethod],
    optics_params: Optional[OpticsParams],
    k: Optional[int],
) -> Dict[RankingMethod, FeatureRanking]:
    training = partial.subset(train)
    if k is None:
        if optics_params is None:
            raise ConfigError("Either a latent dimension or OPTICS parameters are required")
        k = latent_dim(training, optics_params)
    state = fit(training, k, hp)
    return {method: SCORERS[method](state) for method in methods}


def _evaluate_fold(
    fold: int,
    partial: PmlDataset,
    truth: np.ndarray,
    plan: FoldPlan,
    fractions: Sequence[float],
    hp: HyperParams,
    methods: Sequence[RankingMethod],
    optics_params: Optional[OpticsParams],
    k: Optional[int],
    rankings: Optional[Mapping[RankingMethod, FeatureRanking]],
    random_orders: int,
):
    train, test = plan.train_indices(fold), plan.test_indices(fold)
    if rankings is None:
        rankings = _fold_rankings(partial, train, hp, methods, optics_params, k)
    baselines = [random_ranking(partial.d, hp.seed + offset) for offset in range(random_orders)]

    def score(selected):
        return evaluate_selection(partial.x[train], truth[train], partial.x[test], truth[test], selected)

    records, excluded = [], []
    for fraction in fractions:
        results = {method: score(select_top(ranking, fraction)) for method, ranking in rankings.items()}
        if baselines:
            runs = pd.DataFrame([score(select_top(baseline, fraction)) for baseline in baselines])
            results[RankingMethod.RANDOM] = runs.mean().to_dict()
        for method, values in results.items():
            for metric in METRICS:
                records.append((partial.name, method.value, fraction, fold, metric, float(values[metric])))
            excluded.append((partial.name, method.value, fraction, fold, int(round(values["excluded_rows"]))))
    return records, excluded


def cross_validate(
    partial: PmlDataset,
    truth: Optional[np.ndarray],
    fractions: Sequence[float],
    plan: FoldPlan,
    hp: HyperParams,
    *,
    methods: Sequence[RankingMethod] = (RankingMethod.QR,),
    optics_params: Optional[OpticsParams] = None,
    k: Optional[int] = None,
    rankings: Optional[Mapping[RankingMethod, FeatureRanking]] = None,
    random_orders: int = 0,
    n_jobs: int = 1,
) -> MetricsReport:
    """
    For every fold, refit on the training rows' candidate labels only, rank features,
    and for every fraction train the classifier on the training rows' ground truth and
    score the held-out rows against their ground truth. Passing `rankings` skips the
    refit and evaluates those fixed rankings instead
    """
    truth = partial.truth if truth is None else np.asarray(truth, dtype=np.float64)
    if truth is None:
        raise ConfigError("Ground-truth labels are required for evaluation")
    if len(plan.assignments) != partial.n:
        raise ConfigError(f"Fold plan covers {len(plan.assignments)} instances, dataset has {partial.n}")

    logger.info(
        "Cross-validating %s: %d folds, %d fractions, methods %s",
        partial.name,
        plan.n_folds,
        len(fractions),
        ", ".join(m.value for m in methods),
    )
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_evaluate_fold)(
            fold, partial, truth, plan, fractions, hp, methods, optics_params, k, rankings, random_orders
        )
        for fold in range(plan.n_folds)
    )
    records = [record for fold_records, _ in outcomes for record in fold_records]
    excluded = [row for _, fold_excluded in outcomes for row in fold_excluded]
    return MetricsReport(
        dataset=partial.name,
        records=pd.DataFrame(records, columns=["dataset", "method", "fraction", "fold", "metric", "value"]),
        excluded=pd.DataFrame(excluded, columns=["dataset", "method", "fraction", "fold", "excluded_rows"]),
    )


def parameter_sweep(
    partial: PmlDataset,
    truth: Optional[np.ndarray],
    fractions: Sequence[float],
    plan: FoldPlan,
    hp: HyperParams,
    *,
    values: Sequence[float] = GRID_VALUES,
    parameters: Sequence[str] = ("alpha", "beta", "gamma"),
    optics_params: Optional[OpticsParams] = None,
    k: Optional[int] = None,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """
    Vary one weight at a time over `values`, keeping the others at `hp`. One row per
    grid point and metric, with the overall mean and std of the QR ranking
    """
    rows = []
    for parameter in parameters:
        for value in values:
            report = cross_validate(
                partial,
                truth,
                fractions,
                plan,
                replace(hp, **{parameter: value}),
                optics_params=optics_params,
                k=k,
                n_jobs=n_jobs,
            )
            for row in report.overall().itertuples(index=False):
                rows.append((parameter, value, row.method, row.metric, row.mean, row.std))
    return pd.DataFrame(rows, columns=["parameter", "value", "method", "metric", "mean", "std"])


def robustness_spread(grid: pd.DataFrame, metric: str = "ranking_loss", limit: float = ROBUSTNESS_LIMIT) -> Dict[str, float]:
    """
    Max minus min of the mean `metric` across each parameter's sweep. Spreads at or
    above `limit` are logged as warnings
    """
    spreads = {}
    for parameter, rows in grid[grid["metric"] == metric].groupby("parameter", sort=True):
        spread = float(rows["mean"].max() - rows["mean"].min())
        spreads[parameter] = spread
        if spread >= limit:
            logger.warning("Mean %s varies by %.3f across the %s sweep (limit %.2f)", metric, spread, parameter, limit)
    return spreads
