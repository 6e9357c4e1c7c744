import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.Ensemble import Ensemble
from recall_sentinel.models.Evaluation.metrics import lift_at, rank_order, top_count
from recall_sentinel.models.Evaluation.stats import spearman_or_none

logger = logging.getLogger(__name__)

STRATIFICATIONS = {'classification': list(CONSTS.RECALL_CLASSES), 'rx_otc': list(CONSTS.RX_OTC_VALUES)}


class Stratum(BaseModel):
    stratum: str
    top_count: int
    overall_count: int
    top_proportion: Optional[float]
    overall_proportion: float
    relative_likelihood: Optional[float]


class StrataReport(BaseModel):
    fraction: float
    positives: int
    positives_in_top: int
    strata: Dict[str, List[Stratum]]


class PruneSweepResult(BaseModel):
    fraction: float
    points: List[Tuple[int, float]]
    best_m: int
    best_lift: float


class ClusterUsage(BaseModel):
    cluster_sizes: List[int]
    wins: List[int]
    spearman_rho: Optional[float]
    spearman_p: Optional[float]


def strata_analysis(test_examples: pd.DataFrame, scores, fraction: float = CONSTS.DEFAULT_LIFT_FRACTION) -> StrataReport:
    """
    Stratum shares among positives ranked in the top fraction against their shares among
    all positives; relative likelihood = top share / overall share - 1.
    """
    labels = test_examples['label'].to_numpy()
    if labels.sum() == 0:
        raise InsufficientDataError('Strata analysis needs positive test examples')
    top = np.zeros(len(labels), dtype=bool)
    top[rank_order(scores)[:top_count(fraction, len(labels))]] = True
    positives = test_examples[labels == 1]
    top_positives = test_examples[(labels == 1) & top]
    if top_positives.empty:
        logger.warning(f"No positive examples in the top {fraction:.0%}; strata shares undefined")

    strata = {}
    for column, values in STRATIFICATIONS.items():
        rows = []
        for value in values:
            overall = int((positives[column] == value).sum())
            in_top = int((top_positives[column] == value).sum())
            overall_share = overall / len(positives)
            top_share = in_top / len(top_positives) if len(top_positives) else None
            relative = None
            if overall == 0:
                logger.warning(f"Stratum {column}={value} absent from test positives; relative likelihood undefined")
            elif top_share is not None:
                relative = top_share / overall_share - 1.0
            rows.append(Stratum(stratum=value, top_count=in_top, overall_count=overall, top_proportion=top_share,
                                overall_proportion=overall_share, relative_likelihood=relative))
        strata[column] = rows
    return StrataReport(fraction=fraction, positives=len(positives), positives_in_top=len(top_positives), strata=strata)


def prune_sweep(ensemble: Ensemble, X, labels, m_grid: Optional[Sequence[int]] = None,
                fraction: float = CONSTS.DEFAULT_LIFT_FRACTION) -> PruneSweepResult:
    """lift@fraction when only the m largest-cluster members vote, for every m in the grid."""
    n_members = len(ensemble.members)
    m_grid = list(range(1, n_members + 1)) if m_grid is None else sorted(set(int(m) for m in m_grid))
    if not m_grid or m_grid[0] < 1 or m_grid[-1] > n_members:
        raise ConfigurationError(f"prune grid must lie within [1, {n_members}]", m_grid)
    pruned = np.maximum.accumulate(ensemble.member_outputs(X), axis=1)
    points = [(m, lift_at(pruned[:, m - 1], labels, fraction).lift) for m in m_grid]
    best_m, best_lift = max(points, key=lambda p: (p[1], -p[0]))
    return PruneSweepResult(fraction=fraction, points=points, best_m=best_m, best_lift=best_lift)


def cluster_usage(ensemble: Ensemble, X) -> ClusterUsage:
    """How often each member supplies the max-fused score, and its rank correlation with cluster size."""
    outputs = ensemble.member_outputs(X)
    wins = np.bincount(np.argmax(outputs, axis=1), minlength=len(ensemble.members))
    sizes = ensemble.cluster_sizes
    corr = spearman_or_none(sizes, wins) if len(sizes) >= 3 else None
    return ClusterUsage(cluster_sizes=sizes, wins=wins.tolist(),
                        spearman_rho=corr[0] if corr else None, spearman_p=corr[1] if corr else None)
