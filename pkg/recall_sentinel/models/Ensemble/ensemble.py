import json
import logging
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, validator
from sklearn.preprocessing import StandardScaler

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InputFormatError, InsufficientDataError
from recall_sentinel.cli.worker.tasks import parallel_map
from recall_sentinel.models.Ensemble.kmeans import kmeans
from recall_sentinel.models.Ensemble.linear import LinearMember, fit_linear, interaction_map

logger = logging.getLogger(__name__)


class StandardizationStats(BaseModel):
    mean: List[float]
    std: List[float]

    @classmethod
    def fit(cls, X: np.ndarray) -> 'StandardizationStats':
        # StandardScaler leaves zero-variance columns with scale 1
        scaler = StandardScaler().fit(np.asarray(X, dtype=float))
        return cls(mean=scaler.mean_.tolist(), std=scaler.scale_.tolist())

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - np.asarray(self.mean)) / np.asarray(self.std)


class Ensemble(BaseModel):
    members: List[LinearMember]
    standardization: StandardizationStats
    k: int
    seed: int
    lam: float
    horizon: Optional[int] = None
    # first test day of the split the members were fitted on
    train_end_day: Optional[int] = None
    attribute_names: List[str] = CONSTS.ATTRIBUTE_NAMES
    version: str = CONSTS.ARTIFACT_VERSION

    @validator('members')
    def non_empty(cls, v):
        if not v:
            raise ValueError('an ensemble needs at least one member')
        return v

    @property
    def weight_matrix(self) -> np.ndarray:
        return np.array([m.weights for m in self.members])

    @property
    def cluster_sizes(self) -> List[int]:
        return [m.cluster_size for m in self.members]

    def _check_prune(self, prune_m: Optional[int]) -> int:
        if prune_m is None:
            return len(self.members)
        if not 1 <= prune_m <= len(self.members):
            raise ConfigurationError(f"prune must be in [1, {len(self.members)}], got {prune_m}")
        return prune_m

    def member_outputs(self, X) -> np.ndarray:
        """(n_examples, n_members) raw linear outputs in member order."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return interaction_map(self.standardization.transform(X)) @ self.weight_matrix.T

    def predict(self, X, prune_m: Optional[int] = None) -> Union[float, np.ndarray]:
        """Max over the first prune_m members (largest clusters first)."""
        m = self._check_prune(prune_m)
        single = np.ndim(X) == 1
        scores = self.member_outputs(X)[:, :m].max(axis=1)
        return float(scores[0]) if single else scores

    def to_json(self) -> str:
        return json.dumps(self.dict(), sort_keys=True, indent=1, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> 'Ensemble':
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputFormatError(f"Model artifact is not valid JSON: {e}")
        ensemble = cls(**payload)
        width = 1 + len(ensemble.attribute_names) + len(ensemble.attribute_names) * (len(ensemble.attribute_names) - 1) // 2
        if any(len(m.weights) != width for m in ensemble.members):
            raise InputFormatError(f"Model artifact members must carry {width} weights")
        return ensemble


def predict(ensemble: Ensemble, x, prune_m: Optional[int] = None):
    return ensemble.predict(x, prune_m)


def _merge_small_clusters(assignments: np.ndarray, centroids: np.ndarray,
                          min_size: int = CONSTS.MIN_CLUSTER_NEGATIVES) -> np.ndarray:
    """Fold clusters holding fewer than min_size points into their nearest surviving cluster."""
    assignments = assignments.copy()
    while True:
        sizes = np.bincount(assignments, minlength=len(centroids))
        alive = np.flatnonzero(sizes > 0)
        small = [c for c in alive if sizes[c] < min_size]
        if not small or len(alive) == 1:
            return assignments
        victim = min(small, key=lambda c: (sizes[c], c))
        others = alive[alive != victim]
        target = others[np.argmin(np.linalg.norm(centroids[others] - centroids[victim], axis=1))]
        logger.warning(f"Cluster {victim} has {sizes[victim]} negatives, merged into cluster {target}")
        assignments[assignments == victim] = target


def train_ensemble(train: pd.DataFrame, k: int = CONSTS.DEFAULT_K, lam: float = CONSTS.DEFAULT_LAMBDA,
                   seed: int = CONSTS.DEFAULT_SEED, horizon: Optional[int] = None,
                   train_end_day: Optional[int] = None, threads: Optional[int] = None) -> Ensemble:
    """
    Standardize on the training rows, cluster the negatives with k-means, and fit one
    member per cluster against every training positive.
    """
    X = train[CONSTS.ATTRIBUTE_NAMES].to_numpy(dtype=float)
    y = train['label'].to_numpy()
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos < 1:
        raise InsufficientDataError('Training data holds no positive examples')
    if n_neg < k:
        raise InsufficientDataError(f"Training data holds {n_neg} negatives, fewer than k={k}")

    standardization = StandardizationStats.fit(X)
    Z = standardization.transform(X)
    negatives, positives = Z[y == 0], Z[y == 1]
    clustering = kmeans(negatives, k, seed=seed)
    assignments = _merge_small_clusters(clustering.assignments, clustering.centroids)
    phi_pos = interaction_map(positives)
    phi_neg = interaction_map(negatives)

    def fit_cluster(cluster_id):
        rows = assignments == cluster_id
        phi = np.vstack([phi_neg[rows], phi_pos])
        labels = np.concatenate([np.zeros(int(rows.sum()), dtype=int), np.ones(len(phi_pos), dtype=int)])
        return fit_linear(phi, labels, lam=lam, cluster_id=int(cluster_id), cluster_size=int(rows.sum()))

    cluster_ids = np.unique(assignments)
    members = parallel_map(fit_cluster, cluster_ids, threads=threads)
    members.sort(key=lambda m: (-m.cluster_size, m.cluster_id))
    n_valid = sum(m.stats_valid for m in members)
    if n_valid < len(members):
        logger.warning(f"{len(members) - n_valid} of {len(members)} members lack residual degrees of freedom for statistics")
    logger.info(f"Trained ensemble: {len(members)} members, {n_pos} positives, cluster sizes {[m.cluster_size for m in members][:10]}...")
    return Ensemble(members=members, standardization=standardization, k=k, seed=seed, lam=lam, horizon=horizon,
                    train_end_day=train_end_day)
