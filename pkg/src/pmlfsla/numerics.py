"""
Dense matrix helpers shared by the rest of the package. Matrices are plain float64
numpy arrays; the helpers add the shape and sign checks the optimizer relies on.
"""
import numpy as np

from .exceptions import DataError, ShapeError


def as_matrix(values, name: str = "matrix", nonnegative: bool = False) -> np.ndarray:
    """
    Copy `values` into a read-only, row-major float64 2-D array. With `nonnegative`
    set, any entry below zero is rejected
    """
    matrix = np.array(values, dtype=np.float64, order="C", ndmin=2)
    if matrix.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {matrix.shape}")
    if nonnegative and matrix.size and matrix.min() < 0:
        row, column = np.unravel_index(np.argmin(matrix), matrix.shape)
        raise DataError(f"{name} has a negative entry", row=int(row), column=int(column))
    matrix.flags.writeable = False
    return matrix


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"Cannot multiply {a.shape} by {b.shape}")
    return a @ b


def frobenius_sq(a: np.ndarray) -> float:
    return float(np.sum(np.square(a)))


def row_l2_norms(a: np.ndarray) -> np.ndarray:
    """
    Euclidean norm of every row, taken on rows scaled by their largest magnitude so
    entries whose squares would underflow still count. An exactly zero row scores 0
    """
    a = np.asarray(a, dtype=np.float64)
    scale = np.max(np.abs(a), axis=1) if a.shape[1] else np.zeros(a.shape[0])
    norms = np.zeros(a.shape[0])
    nonzero = scale > 0
    scaled = a[nonzero] / scale[nonzero, np.newaxis]
    norms[nonzero] = scale[nonzero] * np.sqrt(np.sum(scaled * scaled, axis=1))
    return norms


def l21_norm(a: np.ndarray) -> float:
    """Sum of row-wise L2 norms"""
    return float(np.sum(row_l2_norms(a)))
