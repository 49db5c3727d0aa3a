import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .exceptions import ConfigError
from .factorization import FactorState
from .numerics import matmul, row_l2_norms

logger = logging.getLogger(__name__)

SMALL_D = 20
DEFAULT_FRACTIONS = tuple(round(0.01 * i, 2) for i in range(1, 21))


class RankingMethod(str, enum.Enum):
    QR = "QR"
    Q_ONLY = "Q_ONLY"
    RANDOM = "RANDOM"


@dataclass(frozen=True, eq=False)
class FeatureRanking:
    scores: np.ndarray
    order: np.ndarray
    method: RankingMethod

    @classmethod
    def from_scores(cls, scores: np.ndarray, method: RankingMethod) -> "FeatureRanking":
        """Order by descending score, ties by ascending feature index"""
        scores = np.asarray(scores, dtype=np.float64)
        order = np.lexsort((np.arange(len(scores)), -scores))
        return cls(scores=scores, order=order, method=method)

    @property
    def d(self) -> int:
        return len(self.scores)


def score_qr(state: FactorState) -> FeatureRanking:
    scores = row_l2_norms(matmul(state.q_mat, state.r_mat))
    if not np.any(scores > 0):
        logger.warning("All %d QR scores are zero; the ranking is feature index order, not a selection", len(scores))
    return FeatureRanking.from_scores(scores, RankingMethod.QR)


def score_q_only(state: FactorState) -> FeatureRanking:
    return FeatureRanking.from_scores(row_l2_norms(state.q_mat), RankingMethod.Q_ONLY)


SCORERS = {
    RankingMethod.QR: score_qr,
    RankingMethod.Q_ONLY: score_q_only,
}


def random_ranking(d: int, seed: int) -> FeatureRanking:
    """Seeded uniformly random order, used as the evaluation baseline"""
    scores = np.random.default_rng(seed).permutation(d).astype(np.float64)
    return FeatureRanking.from_scores(scores, RankingMethod.RANDOM)


def budget_size(d: int, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise ConfigError(f"Selection fraction must lie in (0, 1], got {fraction}")
    # absorb representation error such as 0.29 * 100 = 28.999999999999996
    return max(1, math.floor(fraction * d + 1e-9))


def select_top(ranking: FeatureRanking, fraction: float) -> np.ndarray:
    return ranking.order[: budget_size(ranking.d, fraction)]


def feature_budgets(d: int, fractions: Sequence[float] = DEFAULT_FRACTIONS) -> List[float]:
    """
    Selection fractions to evaluate. Datasets with at most 20 features sweep every
    absolute count 1..d instead
    """
    if d <= SMALL_D:
        return [count / d for count in range(1, d + 1)]
    return list(fractions)
