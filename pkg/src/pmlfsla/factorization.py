"""
Joint nonnegative factorization of the feature and candidate label matrices with a
latent alignment term and a row-sparse penalty on QR.

Objective, for X (n x d), candidate labels Y (n x l) and latent dimension k:

    ||X - L Q^T||_F^2 + alpha ||T - P R||_F^2 + beta ||L - P||_F^2 + gamma ||Q R||_{2,1}
        + delta ||T - Y||_F^2

L, P are n x k latent cluster matrices, Q is d x k, R is k x l and T (n x l) is the
disambiguated label matrix, started at Y and kept inside the candidate set. The delta
term anchors T to Y; with delta=0 the minimum sits at R = 0, T = 0. The L2,1 term is
handled by iterative reweighting with the diagonal D_ii = 1 / (2 ||(QR)_i||_2 + eps_d),
refreshed once per sweep, and every factor is moved by a multiplicative update so it
stays nonnegative.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Set, Tuple

import numpy as np

from .data import PmlDataset
from .exceptions import ConfigError, NumericFailure
from .numerics import as_matrix, frobenius_sq, l21_norm, matmul, row_l2_norms

logger = logging.getLogger(__name__)

INIT_LOW = 0.01
COLLAPSE_THRESHOLD = 1e-12


@dataclass(frozen=True)
class HyperParams:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0
    eps_d: float = 1e-8
    eps_div: float = 1e-12
    max_iter: int = 500
    rel_tol: float = 1e-6
    seed: int = 0
    # reproduces the printed Q and R rules, which leave D out of the gamma terms
    plain_frobenius: bool = False

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "eps_d", "eps_div"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be strictly positive, got {value}")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise ConfigError(f"delta must be non-negative, got {self.delta}")
        if self.max_iter < 0:
            raise ConfigError(f"max_iter must be non-negative, got {self.max_iter}")
        if not (0 <= self.rel_tol < 1):
            raise ConfigError(f"rel_tol must lie in [0, 1), got {self.rel_tol}")


class ObjectiveTerms(NamedTuple):
    reconstruction: float
    label_fit: float
    alignment: float
    sparsity: float
    anchoring: float

    @property
    def total(self) -> float:
        return self.reconstruction + self.label_fit + self.alignment + self.sparsity + self.anchoring


class SweepRecord(NamedTuple):
    iteration: int
    objective: float
    reconstruction: float
    label_fit: float
    alignment: float
    sparsity: float
    anchoring: float
    min_entry: float
    max_entry: float


@dataclass(frozen=True, eq=False)
class FactorState:
    l_mat: np.ndarray
    q_mat: np.ndarray
    p_mat: np.ndarray
    r_mat: np.ndarray
    t_mat: np.ndarray
    d_diag: np.ndarray
    iter: int = 0
    history: Tuple[SweepRecord, ...] = field(default=())

    def __post_init__(self):
        for name in ("l_mat", "q_mat", "p_mat", "r_mat", "t_mat"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name, nonnegative=True))

    @property
    def k(self) -> int:
        return self.q_mat.shape[1]

    @property
    def objective_trace(self) -> List[float]:
        return [record.objective for record in self.history]

    def factors(self) -> Dict[str, np.ndarray]:
        return {"L": self.l_mat, "Q": self.q_mat, "P": self.p_mat, "R": self.r_mat, "T": self.t_mat}


def objective_terms(state: FactorState, ds: PmlDataset, hp: HyperParams) -> ObjectiveTerms:
    return ObjectiveTerms(
        reconstruction=frobenius_sq(ds.x - matmul(state.l_mat, state.q_mat.T)),
        label_fit=hp.alpha * frobenius_sq(state.t_mat - matmul(state.p_mat, state.r_mat)),
        alignment=hp.beta * frobenius_sq(state.l_mat - state.p_mat),
        sparsity=hp.gamma * l21_norm(matmul(state.q_mat, state.r_mat)),
        anchoring=hp.delta * frobenius_sq(state.t_mat - ds.y),
    )


def objective(state: FactorState, ds: PmlDataset, hp: HyperParams) -> float:
    """Exact objective with the true L2,1 norm, not its reweighted relaxation"""
    return objective_terms(state, ds, hp).total


def reweight_d(state: FactorState, hp: HyperParams) -> np.ndarray:
    return 1.0 / (2.0 * row_l2_norms(matmul(state.q_mat, state.r_mat)) + hp.eps_d)


def _record(state: FactorState, ds: PmlDataset, hp: HyperParams) -> SweepRecord:
    terms = objective_terms(state, ds, hp)
    entries = [m for m in state.factors().values() if m.size]
    return SweepRecord(
        iteration=state.iter,
        objective=terms.total,
        reconstruction=terms.reconstruction,
        label_fit=terms.label_fit,
        alignment=terms.alignment,
        sparsity=terms.sparsity,
        anchoring=terms.anchoring,
        min_entry=float(min(m.min() for m in entries)),
        max_entry=float(max(m.max() for m in entries)),
    )


def init_state(ds: PmlDataset, k: int, hp: HyperParams) -> FactorState:
    """
    Draw L, Q, P, R uniformly on (0.01, 1] from the seeded generator and start T at Y
    """
    if k < 2:
        raise ConfigError(f"Latent dimension must be at least 2, got {k}")
    if k > min(ds.n, ds.d, ds.l):
        raise ConfigError(f"Latent dimension {k} exceeds min(n, d, l) = {min(ds.n, ds.d, ds.l)}")
    if ds.x.size and ds.x.min() < 0:
        raise ConfigError("Feature matrix must be nonnegative; normalize the dataset first")

    rng = np.random.default_rng(hp.seed)

    def uniform(shape):
        # (0.01, 1]: mirror numpy's [0, 1) draw so the upper end is closed
        return 1.0 - (1.0 - INIT_LOW) * rng.random(shape)

    l_mat = uniform((ds.n, k))
    q_mat = uniform((ds.d, k))
    p_mat = uniform((ds.n, k))
    r_mat = uniform((k, ds.l))
    state = FactorState(
        l_mat=l_mat,
        q_mat=q_mat,
        p_mat=p_mat,
        r_mat=r_mat,
        t_mat=ds.y,
        d_diag=np.ones(ds.d),
    )
    state = replace(state, d_diag=reweight_d(state, hp))
    return replace(state, history=(_record(state, ds, hp),))


def _checked(matrix: np.ndarray, name: str, iteration: int) -> np.ndarray:
    if not np.all(np.isfinite(matrix)):
        raise NumericFailure(iteration, name)
    return matrix


def update_sweep(state: FactorState, ds: PmlDataset, hp: HyperParams) -> FactorState:
    """
    One pass of the multiplicative rules in the order L, Q, P, R, T, followed by a
    refresh of D from the new Q and R. D stays fixed for the whole pass
    """
    x, eps = ds.x, hp.eps_div
    l_mat, q_mat, p_mat, r_mat, t_mat = state.l_mat, state.q_mat, state.p_mat, state.r_mat, state.t_mat
    d_col = state.d_diag[:, np.newaxis]
    it = state.iter + 1

    l_mat = _checked(
        l_mat * (x @ q_mat + hp.beta * p_mat) / (l_mat @ (q_mat.T @ q_mat) + hp.beta * l_mat + eps), "L", it
    )

    qr_rt = q_mat @ (r_mat @ r_mat.T)
    penalty_q = qr_rt if hp.plain_frobenius else d_col * qr_rt
    q_mat = _checked(q_mat * (x.T @ l_mat) / (q_mat @ (l_mat.T @ l_mat) + hp.gamma * penalty_q + eps), "Q", it)

    # The printed numerator reads alpha T R^T + 2 beta L; the stationarity condition of
    # the alignment term gives alpha T R^T + beta L, which is what is applied here.
    p_mat = _checked(
        p_mat
        * (hp.alpha * t_mat @ r_mat.T + hp.beta * l_mat)
        / (hp.alpha * p_mat @ (r_mat @ r_mat.T) + hp.beta * p_mat + eps),
        "P",
        it,
    )

    q_weighted = q_mat if hp.plain_frobenius else d_col * q_mat
    r_mat = _checked(
        r_mat
        * (hp.alpha * p_mat.T @ t_mat)
        / (hp.alpha * (p_mat.T @ p_mat) @ r_mat + hp.gamma * (q_mat.T @ q_weighted) @ r_mat + eps),
        "R",
        it,
    )

    # delta=0 reduces this to T * PR / (T + eps)
    anchor = hp.delta / hp.alpha
    t_mat = _checked(t_mat * (p_mat @ r_mat + anchor * ds.y) / ((1.0 + anchor) * t_mat + eps), "T", it)

    swept = FactorState(
        l_mat=l_mat,
        q_mat=q_mat,
        p_mat=p_mat,
        r_mat=r_mat,
        t_mat=t_mat,
        d_diag=state.d_diag,
        iter=it,
        history=state.history,
    )
    swept = replace(swept, d_diag=_checked(reweight_d(swept, hp), "D", it))
    return replace(swept, history=state.history + (_record(swept, ds, hp),))


def _report_collapse(state: FactorState, collapsed: Set[str]) -> Set[str]:
    found = {f"Q[:, {column}]" for column in np.flatnonzero(state.q_mat.max(axis=0, initial=0.0) < COLLAPSE_THRESHOLD)}
    if state.r_mat.max(initial=0.0) < COLLAPSE_THRESHOLD:
        found.add("R")
    for name in sorted(found - collapsed):
        logger.warning("%s collapsed below %g at iteration %d", name, COLLAPSE_THRESHOLD, state.iter)
    return collapsed | found


def fit(ds: PmlDataset, k: int, hp: HyperParams) -> FactorState:
    """
    Sweep until the relative change of the objective drops below `rel_tol` or
    `max_iter` sweeps have run. If R collapses to zero every QR score ties, so the fit
    stops there and returns the last state whose R was still above the threshold
    """
    state = init_state(ds, k, hp)
    logger.info("Fitting %s with k=%d (initial objective %.6g)", ds.name, k, state.objective_trace[-1])
    collapsed = set()
    while state.iter < hp.max_iter:
        last = state
        previous = state.objective_trace[-1]
        state = update_sweep(state, ds, hp)
        current = state.objective_trace[-1]
        logger.debug("iteration %d objective %.10g", state.iter, current)
        collapsed = _report_collapse(state, collapsed)
        if "R" in collapsed:
            logger.warning("Keeping the state from iteration %d, the last with a non-zero R", last.iter)
            state = last
            break
        if abs(current - previous) / max(previous, hp.eps_div) < hp.rel_tol:
            break
    logger.info("Stopped after %d sweeps, objective %.6g", state.iter, state.objective_trace[-1])
    return state


def kkt_residuals(state: FactorState, ds: PmlDataset, hp: HyperParams) -> Dict[str, float]:
    """
    Max-norm of min(factor, |gradient|) for every factor, with gradients of the
    reweighted objective at the state's frozen D. T is only free on the support of Y
    """
    x = ds.x
    l_mat, q_mat, p_mat, r_mat, t_mat = state.l_mat, state.q_mat, state.p_mat, state.r_mat, state.t_mat
    d_col = np.ones((ds.d, 1)) if hp.plain_frobenius else state.d_diag[:, np.newaxis]
    pr = p_mat @ r_mat
    gradients = {
        "L": 2 * (l_mat @ (q_mat.T @ q_mat) - x @ q_mat + hp.beta * (l_mat - p_mat)),
        "Q": 2 * (q_mat @ (l_mat.T @ l_mat) - x.T @ l_mat + hp.gamma * d_col * (q_mat @ r_mat @ r_mat.T)),
        "P": 2 * (hp.alpha * (p_mat @ r_mat @ r_mat.T - t_mat @ r_mat.T) + hp.beta * (p_mat - l_mat)),
        "R": 2 * (hp.alpha * (p_mat.T @ pr - p_mat.T @ t_mat) + hp.gamma * q_mat.T @ (d_col * q_mat) @ r_mat),
        "T": 2 * (hp.alpha * (t_mat - pr) + hp.delta * (t_mat - ds.y)) * (ds.y > 0),
    }
    factors = state.factors()
    return {
        name: float(np.max(np.minimum(factors[name], np.abs(gradient)), initial=0.0))
        for name, gradient in gradients.items()
    }
