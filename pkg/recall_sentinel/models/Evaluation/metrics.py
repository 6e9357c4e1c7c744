import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.stats import rankdata
from sklearn.metrics import auc as trapezoid_area, roc_curve

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.utils import check_finite

logger = logging.getLogger(__name__)


class RocResult(BaseModel):
    fpr: List[float]
    tpr: List[float]
    thresholds: List[Optional[float]]
    auc: float

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))

    def trapezoid_auc(self) -> float:
        return float(trapezoid_area(self.fpr, self.tpr))


class LiftResult(BaseModel):
    fraction: float
    lift: float
    n_top: int
    positives_in_top: int
    curve: List[Tuple[float, float]] = []


def _scores_and_labels(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    scores = check_finite(scores, 'scores').ravel()
    labels = np.asarray(labels).ravel()
    if len(scores) != len(labels):
        raise ValueError('scores and labels differ in length', (len(scores), len(labels)))
    if not np.isin(labels, (0, 1)).all():
        raise ValueError('labels must be 0 or 1')
    return scores, labels.astype(int)


def pairwise_auc(scores, labels) -> float:
    """Mann-Whitney form: pairs ordered correctly, ties counting half."""
    scores, labels = _scores_and_labels(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    ranks = rankdata(scores, method='average')
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_auc(scores, labels) -> RocResult:
    scores, labels = _scores_and_labels(scores, labels)
    if labels.min() == labels.max():
        raise InsufficientDataError('ROC needs both positive and negative examples')
    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    return RocResult(fpr=fpr.tolist(), tpr=tpr.tolist(),
                     thresholds=[float(t) if np.isfinite(t) and i > 0 else None for i, t in enumerate(thresholds)],
                     auc=pairwise_auc(scores, labels))


def top_count(fraction: float, n: int) -> int:
    if not 0 < fraction <= 1:
        raise ConfigurationError(f"lift fraction must be in (0, 1], got {fraction}")
    # rounding first keeps 0.05 * 200 at 10 instead of 11
    return max(1, math.ceil(round(fraction * n, 9)))


def rank_order(scores) -> np.ndarray:
    """Descending by score; equal scores keep their input (canonical key) order."""
    return np.argsort(-np.asarray(scores, dtype=float), kind='stable')


def lift_at(scores, labels, fraction: float = CONSTS.DEFAULT_LIFT_FRACTION) -> LiftResult:
    """Positives among the top ceil(T*N) ranked examples over the count a random sample would hold."""
    scores, labels = _scores_and_labels(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise InsufficientDataError('Lift needs at least one positive example')
    n_top = top_count(fraction, len(labels))
    hits = int(labels[rank_order(scores)[:n_top]].sum())
    lift = hits / (n_top * n_pos / len(labels))
    return LiftResult(fraction=fraction, lift=lift, n_top=n_top, positives_in_top=hits)


def lift_curve(scores, labels, grid: Sequence[float] = CONSTS.LIFT_GRID) -> List[Tuple[float, float]]:
    scores, labels = _scores_and_labels(scores, labels)
    n, n_pos = len(labels), int(labels.sum())
    if n_pos == 0:
        raise InsufficientDataError('Lift needs at least one positive example')
    cumulative = np.cumsum(labels[rank_order(scores)])
    curve = []
    for fraction in grid:
        n_top = top_count(fraction, n)
        curve.append((float(fraction), float(cumulative[n_top - 1] / (n_top * n_pos / n))))
    return curve
