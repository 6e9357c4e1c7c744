import logging
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.Ensemble import Ensemble, ImportanceReport, attribute_importance, train_ensemble
from recall_sentinel.models.Evaluation.analysis import (ClusterUsage, PruneSweepResult, StrataReport, cluster_usage,
                                                        prune_sweep, strata_analysis)
from recall_sentinel.models.Evaluation.metrics import LiftResult, RocResult, lift_at, lift_curve, roc_auc
from recall_sentinel.models.Evaluation.stats import RankRegressionResult, rank_regression
from recall_sentinel.models.Labeling import DatasetSplit, positive_rate, prepare_examples, split_by_time

logger = logging.getLogger(__name__)


class PipelineParams(BaseModel):
    n_days: int = CONSTS.STUDY_DAYS
    train_end_day: int = CONSTS.TRAIN_END_DAY
    max_horizon: int = CONSTS.MAX_HORIZON
    k: int = CONSTS.DEFAULT_K
    lam: float = CONSTS.DEFAULT_LAMBDA
    seed: int = CONSTS.DEFAULT_SEED
    lift_fraction: float = CONSTS.DEFAULT_LIFT_FRACTION
    prune_m: Optional[int] = None


class EvalReport(BaseModel):
    horizon: Optional[int]
    n_train: Optional[int] = None
    n_test: int
    positives_train: Optional[int] = None
    positives_test: int
    positive_rate_train: Optional[float] = None
    positive_rate_test: float
    prune_m: Optional[int]
    auc: float
    lift: LiftResult
    lift_curve: List[Tuple[float, float]]
    strata: StrataReport
    importance: Optional[ImportanceReport]
    cluster_usage: ClusterUsage
    prune_sweep: PruneSweepResult


class HorizonRun(BaseModel):
    horizon: int
    split: DatasetSplit
    ensemble: Ensemble
    scores: np.ndarray
    roc: RocResult
    lift: LiftResult

    class Config:
        arbitrary_types_allowed = True


class HorizonPoint(BaseModel):
    horizon: int
    auc: Optional[float]
    lift: Optional[float]
    positives_in_test: int
    positives_in_train: int


class HorizonSweepResult(BaseModel):
    fraction: float
    points: List[HorizonPoint]
    predictors: List[str]
    auc_regression: Optional[RankRegressionResult]
    lift_regression: Optional[RankRegressionResult]


def attribute_matrix(examples: pd.DataFrame) -> np.ndarray:
    return examples[CONSTS.ATTRIBUTE_NAMES].to_numpy(dtype=float)


def build_report(test: pd.DataFrame, ensemble: Ensemble, prune_m: Optional[int] = None,
                 fraction: float = CONSTS.DEFAULT_LIFT_FRACTION, train: Optional[pd.DataFrame] = None,
                 m_grid: Optional[Sequence[int]] = None) -> Tuple[EvalReport, RocResult]:
    """Score the test examples and run every metric and meta-analysis on them."""
    X = attribute_matrix(test)
    labels = test['label'].to_numpy()
    scores = ensemble.predict(X, prune_m)
    roc = roc_auc(scores, labels)
    lift = lift_at(scores, labels, fraction)
    try:
        importance = attribute_importance(ensemble)
    except InsufficientDataError as e:
        logger.warning(f"Attribute importance skipped: {e}")
        importance = None
    report = EvalReport(horizon=ensemble.horizon, n_test=len(test), positives_test=int(labels.sum()),
                        positive_rate_test=positive_rate(test), prune_m=prune_m, auc=roc.auc, lift=lift,
                        lift_curve=lift_curve(scores, labels), strata=strata_analysis(test, scores, fraction),
                        importance=importance, cluster_usage=cluster_usage(ensemble, X),
                        prune_sweep=prune_sweep(ensemble, X, labels, m_grid, fraction))
    if train is not None:
        report.n_train = len(train)
        report.positives_train = int(train['label'].sum())
        report.positive_rate_train = positive_rate(train)
    logger.info(f"Evaluation: AUC {roc.auc:.4f}, lift@{fraction:.0%} {lift.lift:.3f} over {len(test)} test examples")
    return report, roc


def run_horizon(features: pd.DataFrame, recalls, horizon: int, params: PipelineParams,
                rx_otc: Optional[Mapping[str, str]] = None, threads: Optional[int] = None) -> HorizonRun:
    """Label, split, train and score one horizon from a feature table."""
    labeled = prepare_examples(features, recalls, horizon, n_days=params.n_days, rx_otc=rx_otc,
                               max_horizon=params.max_horizon)
    split = split_by_time(labeled, params.train_end_day)
    ensemble = train_ensemble(split.train, k=params.k, lam=params.lam, seed=params.seed, horizon=horizon,
                              train_end_day=params.train_end_day, threads=threads)
    X, labels = attribute_matrix(split.test), split.test['label'].to_numpy()
    scores = ensemble.predict(X, params.prune_m)
    return HorizonRun(horizon=horizon, split=split, ensemble=ensemble, scores=scores,
                      roc=roc_auc(scores, labels), lift=lift_at(scores, labels, params.lift_fraction))


def _regress(points: List[HorizonPoint], field: str, predictors: List[str]) -> Optional[RankRegressionResult]:
    usable = [p for p in points if getattr(p, field) is not None]
    design = {name: [getattr(p, name) for p in usable] for name in predictors}
    try:
        return rank_regression([getattr(p, field) for p in usable], design)
    except InsufficientDataError as e:
        logger.warning(f"Rank regression of {field} on {predictors} not possible: {e}")
        return None


def horizon_sweep(features: pd.DataFrame, recalls, params: PipelineParams, horizon_grid: Sequence[int],
                  rx_otc: Optional[Mapping[str, str]] = None, threads: Optional[int] = None) -> HorizonSweepResult:
    """
    Retrain and evaluate at every horizon, then rank-regress AUC and lift on the horizon
    and the number of test positives. When the two predictors are rank-collinear the
    regression falls back to the horizon alone.
    """
    recalls = list(recalls)
    points = []
    for horizon in sorted(set(horizon_grid)):
        try:
            run = run_horizon(features, recalls, horizon, params, rx_otc=rx_otc, threads=threads)
        except InsufficientDataError as e:
            logger.warning(f"Horizon {horizon} skipped: {e}")
            labeled = prepare_examples(features, recalls, horizon, n_days=params.n_days, rx_otc=rx_otc,
                                       max_horizon=params.max_horizon)
            in_test = labeled['day'] >= params.train_end_day
            points.append(HorizonPoint(horizon=horizon, auc=None, lift=None,
                                       positives_in_test=int(labeled.loc[in_test, 'label'].sum()),
                                       positives_in_train=int(labeled.loc[~in_test, 'label'].sum())))
            continue
        points.append(HorizonPoint(horizon=horizon, auc=run.roc.auc, lift=run.lift.lift,
                                   positives_in_test=int(run.split.test['label'].sum()),
                                   positives_in_train=int(run.split.train['label'].sum())))
        logger.info(f"Horizon {horizon}: AUC {run.roc.auc:.4f}, lift {run.lift.lift:.3f}")

    predictors = ['horizon', 'positives_in_test']
    lift_regression = _regress(points, 'lift', predictors)
    auc_regression = _regress(points, 'auc', predictors)
    if lift_regression is None or auc_regression is None:
        predictors = ['horizon']
        lift_regression = _regress(points, 'lift', predictors)
        auc_regression = _regress(points, 'auc', predictors)
    return HorizonSweepResult(fraction=params.lift_fraction, points=points, predictors=predictors,
                              auc_regression=auc_regression, lift_regression=lift_regression)
