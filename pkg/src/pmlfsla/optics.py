"""
OPTICS ordering of the feature columns and the flat cluster extraction that fixes the
latent dimension k
"""
import heapq
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .data import PmlDataset
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

MIN_LATENT_DIM = 2


@dataclass(frozen=True)
class OpticsParams:
    radius: float
    min_pts: int = 5

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ConfigError(f"OPTICS radius must be finite and positive, got {self.radius}")
        if self.min_pts < 2:
            raise ConfigError(f"OPTICS min_pts must be at least 2, got {self.min_pts}")


@dataclass(frozen=True, eq=False)
class ReachabilityPlot:
    order: np.ndarray
    reachability: np.ndarray
    core_distance: np.ndarray
    predecessor: np.ndarray

    def __len__(self):
        return len(self.order)

    def in_order(self):
        """(position, point index, reachability, core distance) in processing order"""
        for position, point in enumerate(self.order):
            yield position, int(point), float(self.reachability[point]), float(self.core_distance[point])


def _core_distances(distances: np.ndarray, params: OpticsParams) -> np.ndarray:
    m = len(distances)
    core = np.full(m, np.inf)
    if m < params.min_pts:
        return core
    # the point itself counts towards min_pts
    kth = np.partition(distances, params.min_pts - 1, axis=1)[:, params.min_pts - 1]
    within = kth <= params.radius
    core[within] = kth[within]
    return core


def optics_order(points: np.ndarray, params: OpticsParams) -> ReachabilityPlot:
    """
    Order `points` (one per row) by density reachability under Euclidean distance,
    using `params.radius` as the generating distance. Seeds are expanded lowest
    reachability first and ties go to the lowest point index
    """
    points = np.asarray(points, dtype=np.float64)
    m = len(points)
    distances = cdist(points, points)
    core = _core_distances(distances, params)
    reachability = np.full(m, np.inf)
    predecessor = np.full(m, -1, dtype=np.int64)
    processed = np.zeros(m, dtype=bool)
    order = []

    def expand(p, seeds):
        neighbours = np.flatnonzero((distances[p] <= params.radius) & ~processed)
        for o in neighbours:
            candidate = max(core[p], distances[p, o])
            if candidate < reachability[o]:
                reachability[o] = candidate
                predecessor[o] = p
                heapq.heappush(seeds, (candidate, int(o)))

    for start in range(m):
        if processed[start]:
            continue
        processed[start] = True
        order.append(start)
        if not np.isfinite(core[start]):
            continue
        seeds = []
        expand(start, seeds)
        while seeds:
            value, q = heapq.heappop(seeds)
            # stale entry left behind by a later decrease
            if processed[q] or value != reachability[q]:
                continue
            processed[q] = True
            order.append(q)
            if np.isfinite(core[q]):
                expand(q, seeds)

    return ReachabilityPlot(
        order=np.array(order, dtype=np.int64),
        reachability=reachability,
        core_distance=core,
        predecessor=predecessor,
    )


def extract_cluster_count(plot: ReachabilityPlot, params: OpticsParams, max_k: Optional[int] = None) -> int:
    """
    Count DBSCAN clusters at eps = radius by scanning the reachability plot, then clamp
    to [2, min(max_k, m - 1)]
    """
    clusters = 0
    for _, point, reach, core in plot.in_order():
        if reach > params.radius and core <= params.radius:
            clusters += 1

    if clusters == 0:
        logger.warning("OPTICS found only noise at radius %g; falling back to k=%d", params.radius, MIN_LATENT_DIM)
        return MIN_LATENT_DIM

    upper = len(plot) - 1
    if max_k is not None:
        upper = min(upper, max_k)
    k = max(MIN_LATENT_DIM, min(clusters, upper))
    logger.debug("OPTICS found %d clusters, latent dimension k=%d", clusters, k)
    return k


def feature_reachability(ds: PmlDataset, params: OpticsParams) -> ReachabilityPlot:
    """OPTICS over the d feature columns, each a point in R^n"""
    return optics_order(ds.x.T, params)


def latent_dim(ds: PmlDataset, params: OpticsParams, plot: Optional[ReachabilityPlot] = None) -> int:
    if plot is None:
        plot = feature_reachability(ds, params)
    return extract_cluster_count(plot, params, max_k=min(ds.d, ds.l))
