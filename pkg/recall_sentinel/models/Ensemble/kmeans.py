import logging
from typing import List

import numpy as np
from pydantic import BaseModel
from sklearn.cluster import kmeans_plusplus
from sklearn.metrics import pairwise_distances_argmin_min

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.utils import check_finite

logger = logging.getLogger(__name__)


class KMeansResult(BaseModel):
    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    history: List[float]
    n_iter: int

    class Config:
        arbitrary_types_allowed = True

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=len(self.centroids))


def assign(points: np.ndarray, centroids: np.ndarray):
    """Nearest centroid per point (lowest index on ties) and the distance to it."""
    labels, dist = pairwise_distances_argmin_min(points, centroids)
    return labels.astype(np.int64), dist


def kmeans(points, k: int, seed: int = CONSTS.DEFAULT_SEED, max_iter: int = CONSTS.KMEANS_MAX_ITER,
           tol: float = CONSTS.KMEANS_TOL) -> KMeansResult:
    """
    k-means++ seeding followed by Lloyd iterations until no centroid moves by tol
    or max_iter is reached. An emptied cluster is re-seeded with the point lying
    farthest from its current centroid. history[i] is the objective at iteration i.
    """
    X = check_finite(points, 'k-means input')
    if X.ndim != 2 or len(X) == 0:
        raise InsufficientDataError('k-means needs a non-empty 2-d point set', X.shape)
    if k < 1:
        raise ConfigurationError(f"k must be at least 1, got {k}")
    if k > len(X):
        raise InsufficientDataError(f"k={k} exceeds the number of points ({len(X)})")

    centroids, _ = kmeans_plusplus(X, k, random_state=np.random.RandomState(seed % 2 ** 32))
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, dist = assign(X, centroids)
        history.append(float(np.sum(dist ** 2)))

        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centroids)
        np.add.at(sums, labels, X)
        updated = centroids.copy()
        filled = counts > 0
        updated[filled] = sums[filled] / counts[filled, None]

        taken = dist.copy()
        for j in np.flatnonzero(~filled):
            far = int(np.argmax(taken))
            updated[j] = X[far]
            taken[far] = -1.0
            logger.debug(f"k-means: cluster {j} emptied, re-seeded from point {far}")

        shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        if shift < tol:
            break

    labels, dist = assign(X, centroids)
    objective = float(np.sum(dist ** 2))
    history.append(objective)
    logger.info(f"k-means (k={k}, n={len(X)}) finished after {n_iter} iterations, objective {objective:.6g}")
    return KMeansResult(centroids=centroids, assignments=labels, objective=objective, history=history, n_iter=n_iter)
