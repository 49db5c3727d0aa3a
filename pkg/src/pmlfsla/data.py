"""
Partial multi-label datasets: CSV ingestion, min-max normalization, additive candidate
noise and cross-validation folds
"""
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from sklearn.model_selection import KFold

from .exceptions import ConfigError, DataError, DatasetNotFound, ShapeError
from .numerics import as_matrix

logger = logging.getLogger(__name__)

# (instances, features, labels) of the eight benchmark datasets
BENCHMARK_SHAPES = {
    "CAL": (555, 49, 6),
    "CHD_49": (555, 49, 6),
    "Chess": (585, 258, 15),
    "Corel5K": (5000, 499, 374),
    "HumanPseAAC": (3106, 40, 14),
    "LLOG_F": (1460, 1004, 75),
    "Water": (1060, 16, 14),
    "Yeast": (2417, 103, 14),
}


@dataclass(frozen=True, eq=False)
class PmlDataset:
    x: np.ndarray
    y: np.ndarray
    feature_names: Tuple[str, ...] = ()
    label_names: Tuple[str, ...] = ()
    name: str = "dataset"
    truth: Optional[np.ndarray] = None

    def __post_init__(self):
        x = as_matrix(self.x, "X")
        y = as_matrix(self.y, "Y")
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"X has {x.shape[0]} rows but Y has {y.shape[0]}")
        bad = np.argwhere((y != 0) & (y != 1))
        if len(bad):
            raise DataError("Y entries must be 0 or 1", row=int(bad[0][0]), column=int(bad[0][1]))
        empty = np.flatnonzero(y.sum(axis=1) == 0)
        if len(empty):
            raise DataError("Instance has no candidate label", row=int(empty[0]))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names) or _default_names("f", x.shape[1]))
        object.__setattr__(self, "label_names", tuple(self.label_names) or _default_names("l", y.shape[1]))
        if self.truth is not None:
            truth = as_matrix(self.truth, "truth")
            if truth.shape != y.shape:
                raise ShapeError(f"Ground truth shape {truth.shape} does not match Y {y.shape}")
            object.__setattr__(self, "truth", truth)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def l(self) -> int:  # noqa: E743
        return self.y.shape[1]

    def subset(self, rows: np.ndarray) -> "PmlDataset":
        truth = None if self.truth is None else self.truth[rows]
        return replace(self, x=self.x[rows], y=self.y[rows], truth=truth)


@dataclass(frozen=True, eq=False)
class FoldPlan:
    n_folds: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.n_folds)


def _default_names(prefix: str, count: int) -> Tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(count))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def _read_numeric_csv(path: Path) -> Tuple[np.ndarray, Optional[Tuple[str, ...]]]:
    """
    Read a comma-separated matrix. A first row whose first cell is not numeric is taken
    as the header. Row numbers in errors are 1-based file lines
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetNotFound(path)
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise DataError(f"{path}: file is empty")
    except pd.errors.ParserError as e:
        raise DataError(f"{path}: ragged rows: {e}")

    header = None
    first_line = 1
    if not _is_number(frame.iat[0, 0]):
        header = tuple(str(cell) for cell in frame.iloc[0])
        frame = frame.iloc[1:]
        first_line = 2

    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    missing = np.argwhere(~np.isfinite(values))
    if len(missing):
        row, column = missing[0]
        raise DataError(f"{path}: missing or non-numeric value", row=int(row) + first_line, column=int(column) + 1)
    return values, header


def load_csv_pair(x_path, y_path, truth_path=None, name: Optional[str] = None) -> PmlDataset:
    """
    Load a feature CSV and a 0/1 candidate label CSV (and optionally a ground-truth
    sidecar of the same shape as Y). X is returned raw, before normalization
    """
    x, feature_names = _read_numeric_csv(x_path)
    y, label_names = _read_numeric_csv(y_path)
    if x.shape[0] != y.shape[0]:
        raise DataError(f"{x_path} has {x.shape[0]} rows but {y_path} has {y.shape[0]}")
    bad = np.argwhere((y != 0) & (y != 1))
    if len(bad):
        raise DataError(f"{y_path}: label entries must be 0 or 1", row=int(bad[0][0]) + 1, column=int(bad[0][1]) + 1)

    truth = None
    if truth_path is not None:
        truth, _ = _read_numeric_csv(truth_path)

    dataset = PmlDataset(
        x=x,
        y=y,
        feature_names=feature_names or (),
        label_names=label_names or (),
        name=name or Path(y_path).stem,
        truth=truth,
    )
    logger.info("Loaded %s: n=%d, d=%d, l=%d", dataset.name, dataset.n, dataset.d, dataset.l)
    return dataset


def write_csv_pair(ds: PmlDataset, x_path, y_path, truth_path=None):
    """Write X, Y and the ground truth if present. A None path skips that file"""
    if x_path is not None:
        pd.DataFrame(ds.x, columns=ds.feature_names).to_csv(x_path, index=False, lineterminator="\n")
    pd.DataFrame(ds.y.astype(int), columns=ds.label_names).to_csv(y_path, index=False, lineterminator="\n")
    if truth_path is not None and ds.truth is not None:
        pd.DataFrame(ds.truth.astype(int), columns=ds.label_names).to_csv(
            truth_path, index=False, lineterminator="\n"
        )


def normalize_minmax(ds: PmlDataset) -> PmlDataset:
    """
    Map every feature column affinely onto [0, 1]. Constant columns become all zeros
    """
    low = ds.x.min(axis=0)
    span = ds.x.max(axis=0) - low
    scaled = np.zeros_like(ds.x)
    varying = span > 0
    scaled[:, varying] = (ds.x[:, varying] - low[varying]) / span[varying]
    return replace(ds, x=scaled)


def inject_candidate_noise(ds: PmlDataset, rate: float, seed: int) -> PmlDataset:
    """
    Turn every absent label into a false-positive candidate with probability `rate`.
    The clean matrix is kept as `truth`
    """
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"Noise rate must lie in [0, 1], got {rate}")
    rng = np.random.default_rng(seed)
    flips = rng.random(ds.y.shape) < rate
    noisy = np.where(ds.y == 1, 1.0, flips.astype(np.float64))
    logger.info("Flipped %d of %d absent labels to candidates", int(noisy.sum() - ds.y.sum()), int((ds.y == 0).sum()))
    return replace(ds, y=noisy, truth=ds.y)


def make_folds(n: int, n_folds: int, seed: int) -> FoldPlan:
    if n_folds < 2:
        raise ConfigError(f"At least 2 folds are needed, got {n_folds}")
    if n < n_folds:
        raise ConfigError(f"Cannot split {n} instances into {n_folds} folds")
    assignments = np.empty(n, dtype=np.int64)
    splitter = KFold(n_splits=n_folds, shuffle=True, random_state=seed)
    for fold, (_, test) in enumerate(splitter.split(np.zeros((n, 1)))):
        assignments[test] = fold
    return FoldPlan(n_folds=n_folds, assignments=assignments, seed=seed)


def make_planted(n: int = 200, d: int = 50, l: int = 8, n_informative: int = 5, seed: int = 0) -> PmlDataset:  # noqa: E741
    """
    Synthetic clean multi-label dataset whose labels depend on n_informative features
    only, placed at seeded random column positions and named `signal<j>`. Informative
    features are sparse binary signals with a little jitter; the remaining `noise<i>`
    features are dense and bunched near their maximum, so after normalization they carry
    most of the feature mass but no label information. Label j copies signal j mod
    n_informative
    """
    rng = np.random.default_rng(seed)
    signals = (rng.random((n, n_informative)) < 0.3).astype(np.float64)
    # every instance needs at least one true label
    silent = np.flatnonzero(signals.sum(axis=1) == 0)
    signals[silent, rng.integers(0, n_informative, size=len(silent))] = 1.0

    informative = signals + 0.05 * rng.random((n, n_informative))
    distractors = rng.beta(8.0, 1.0, size=(n, d - n_informative))
    y = signals[:, np.arange(l) % n_informative]

    columns = rng.permutation(d)
    x = np.empty((n, d))
    x[:, columns[:n_informative]] = informative
    x[:, columns[n_informative:]] = distractors
    names = np.empty(d, dtype=object)
    names[columns[:n_informative]] = [f"signal{j}" for j in range(n_informative)]
    names[columns[n_informative:]] = [f"noise{i}" for i in range(d - n_informative)]
    return PmlDataset(x=x, y=y, feature_names=tuple(names), name="planted")


def informative_columns(ds: PmlDataset) -> np.ndarray:
    """Column positions of the `signal<j>` features of a planted dataset, in signal order"""
    count = sum(name.startswith("signal") for name in ds.feature_names)
    return np.array([ds.feature_names.index(f"signal{j}") for j in range(count)], dtype=np.int64)
