import logging
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.Features import FEATURE_COLUMNS, apply_censoring, before_first_recall
from recall_sentinel.models.Ingest import RecallRecord

logger = logging.getLogger(__name__)

LABELED_COLUMNS = FEATURE_COLUMNS + CONSTS.LABEL_COLUMNS


class DatasetSplit(BaseModel):
    train: pd.DataFrame
    test: pd.DataFrame
    train_end_day: int

    class Config:
        arbitrary_types_allowed = True


def _first_recalls(recalls: Iterable[RecallRecord], rx_otc: Mapping[str, str]) -> Dict[Tuple[str, str], Tuple[int, str, str]]:
    """(drug, state) -> (first recall day, classification, rx_otc); earlier records win day ties."""
    first: Dict[Tuple[str, str], Tuple[int, str, str]] = {}
    for recall in recalls:
        meta_rx = recall.rx_otc or rx_otc.get(recall.drug, CONSTS.UNCLASSIFIED)
        for state in recall.states:
            key = (recall.drug, state)
            if key not in first or recall.day < first[key][0]:
                first[key] = (recall.day, recall.classification, meta_rx)
    return first


def label_examples(rows: pd.DataFrame, recalls: Iterable[RecallRecord], horizon: int,
                   n_days: int = CONSTS.STUDY_DAYS, rx_otc: Optional[Mapping[str, str]] = None,
                   max_horizon: int = CONSTS.MAX_HORIZON) -> pd.DataFrame:
    """
    Label 1 iff the first recall of the row's (drug, state) initiates exactly `horizon`
    days after the row's day. Rows whose target day falls past the study end are dropped.
    """
    if not 1 <= horizon <= max_horizon:
        raise ConfigurationError(f"horizon must be in [1, {max_horizon}], got {horizon}")
    rows = rows[rows['day'].to_numpy() + horizon < n_days].reset_index(drop=True)
    first = _first_recalls(recalls, rx_otc or {})

    labels = np.zeros(len(rows), dtype=np.int64)
    classification = np.full(len(rows), '', dtype=object)
    rx = np.full(len(rows), '', dtype=object)
    if first and len(rows):
        keys = list(zip(rows['drug'], rows['state']))
        target = rows['day'].to_numpy() + horizon
        for i, key in enumerate(keys):
            hit = first.get(key)
            if hit is not None and hit[0] == target[i]:
                labels[i] = 1
                classification[i] = hit[1]
                rx[i] = hit[2]

    labeled = rows[FEATURE_COLUMNS].copy()
    labeled['label'] = labels
    labeled['horizon'] = horizon
    labeled['classification'] = classification
    labeled['rx_otc'] = rx
    logger.info(f"Labeled {len(labeled)} examples at horizon {horizon}: {int(labels.sum())} positives")
    return labeled


def post_recall_exclusion(examples: pd.DataFrame, recalls: Iterable[RecallRecord]) -> pd.DataFrame:
    keep = before_first_recall(examples, recalls)
    dropped = int((~keep).sum())
    if dropped:
        logger.warning(f"Post-recall exclusion removed {dropped} examples that escaped censoring")
    return examples[keep.to_numpy()].reset_index(drop=True)


def split_by_time(examples: pd.DataFrame, train_end_day: int = CONSTS.TRAIN_END_DAY) -> DatasetSplit:
    if train_end_day <= 0:
        raise ConfigurationError(f"train_end_day must be positive, got {train_end_day}")
    in_train = examples['day'].to_numpy() < train_end_day
    train = examples[in_train].reset_index(drop=True)
    test = examples[~in_train].reset_index(drop=True)
    if train.empty:
        raise InsufficientDataError(f"No training examples before day {train_end_day}")
    if test.empty:
        raise InsufficientDataError(f"No test examples on or after day {train_end_day}")
    logger.info(f"Time split at day {train_end_day}: {len(train)} train / {len(test)} test examples")
    return DatasetSplit(train=train, test=test, train_end_day=train_end_day)


def positive_rate(examples: pd.DataFrame) -> float:
    if examples.empty:
        return float('nan')
    return float(examples['label'].mean())


def prepare_examples(features: pd.DataFrame, recalls, horizon: int, n_days: int = CONSTS.STUDY_DAYS,
                     rx_otc: Optional[Mapping[str, str]] = None, max_horizon: int = CONSTS.MAX_HORIZON) -> pd.DataFrame:
    """Censor, label and re-check exclusion in one pass."""
    recalls = list(recalls)
    censored = apply_censoring(features, recalls)
    labeled = label_examples(censored, recalls, horizon, n_days=n_days, rx_otc=rx_otc, max_horizon=max_horizon)
    labeled = post_recall_exclusion(labeled, recalls)
    logger.info(f"Positive rate at horizon {horizon}: {positive_rate(labeled):.5f}")
    return labeled
