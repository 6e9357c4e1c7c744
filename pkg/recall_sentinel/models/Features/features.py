import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, validator

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InputFormatError, InsufficientDataError, WarmupError
from recall_sentinel.cli.worker.tasks import parallel_map
from recall_sentinel.models.Ingest import CountCube, RecallRecord
from recall_sentinel.models.utils import canonical_sort, ols_slope_weights, trailing_means, trailing_windows

logger = logging.getLogger(__name__)

FEATURE_COLUMNS = CONSTS.KEY_COLUMNS + CONSTS.ATTRIBUTE_NAMES


class FeatureRow(BaseModel):
    drug: str
    state: str
    day: int
    attrs: List[float]

    @validator('attrs')
    def twenty_finite(cls, v):
        if len(v) != CONSTS.N_ATTRIBUTES:
            raise ValueError(f"expected {CONSTS.N_ATTRIBUTES} attributes, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise ValueError('attributes must be finite')
        return v

    @validator('day')
    def past_warmup(cls, v):
        if v < CONSTS.WARMUP_DAYS:
            raise ValueError(f"day {v} is inside the {CONSTS.WARMUP_DAYS}-day warm-up")
        return v

    def as_dict(self) -> dict:
        return {'drug': self.drug, 'state': self.state, 'day': self.day, **dict(zip(CONSTS.ATTRIBUTE_NAMES, self.attrs))}


def window_slope(counts: Sequence[float], k_weeks: int) -> float:
    """OLS slope in queries/day over a 7*k_weeks trailing window; last element is the current day."""
    if k_weeks not in CONSTS.SLOPE_WEEKS:
        raise ValueError('Invalid window length in weeks', k_weeks)
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (7 * k_weeks,):
        raise ValueError(f"Invalid series length for a {k_weeks}-week slope", counts.shape)
    return float(ols_slope_weights(7 * k_weeks) @ counts)


def spike_ratio(counts: Sequence[float], short_days: int, long_days: int, alpha: float = CONSTS.RATIO_ALPHA) -> float:
    """(short-window mean + alpha) / (long-window mean + alpha), both windows ending at the last element."""
    if not 0 < short_days < long_days:
        raise ValueError('Invalid window pair', (short_days, long_days))
    counts = np.asarray(counts, dtype=float)
    if len(counts) < long_days:
        raise InsufficientDataError(f"spike ratio over {long_days} days needs {long_days} days of history, got {len(counts)}")
    return float((counts[-short_days:].mean() + alpha) / (counts[-long_days:].mean() + alpha))


def _channel_attributes(series: np.ndarray, first_day: int) -> Tuple[np.ndarray, np.ndarray]:
    """Slopes (n, 7) and ratios (n, 3) for every day from first_day on."""
    slopes = []
    for k in CONSTS.SLOPE_WEEKS:
        width = 7 * k
        per_day = trailing_windows(series, width) @ ols_slope_weights(width)
        slopes.append(per_day[first_day - (width - 1):])
    means = {w: trailing_means(series, w) for w in {w for pair in CONSTS.RATIO_PAIRS for w in pair}}
    ratios = []
    for short, long in CONSTS.RATIO_PAIRS:
        num = means[short][first_day - (short - 1):]
        den = means[long][first_day - (long - 1):]
        ratios.append((num + CONSTS.RATIO_ALPHA) / (den + CONSTS.RATIO_ALPHA))
    return np.column_stack(slopes), np.column_stack(ratios)


def series_attributes(total: np.ndarray, symptom: np.ndarray) -> np.ndarray:
    """Attribute matrix for days WARMUP_DAYS..len-1 of one (drug, state) series pair."""
    total = np.asarray(total, dtype=float)
    symptom = np.asarray(symptom, dtype=float)
    if len(total) <= CONSTS.WARMUP_DAYS:
        return np.empty((0, CONSTS.N_ATTRIBUTES))
    slope_t, ratio_t = _channel_attributes(total, CONSTS.WARMUP_DAYS)
    slope_s, ratio_s = _channel_attributes(symptom, CONSTS.WARMUP_DAYS)
    return np.hstack([slope_t, slope_s, ratio_t, ratio_s])


def extract_features(cube: CountCube, drug: str, state: str, day: int) -> FeatureRow:
    if day < CONSTS.WARMUP_DAYS:
        raise WarmupError(f"day {day} is inside the {CONSTS.WARMUP_DAYS}-day warm-up")
    if day >= cube.n_days:
        raise ValueError('Invalid day index', day)
    total, symptom = cube.series(drug, state)
    lo = day - CONSTS.WARMUP_DAYS
    attrs = series_attributes(total[lo:day + 1], symptom[lo:day + 1])[-1]
    return FeatureRow(drug=drug, state=state, day=day, attrs=attrs.tolist())


def _pair_frame(item) -> pd.DataFrame:
    drug, state, total, symptom = item
    attrs = series_attributes(total, symptom)
    frame = pd.DataFrame(attrs, columns=CONSTS.ATTRIBUTE_NAMES)
    frame.insert(0, 'day', np.arange(CONSTS.WARMUP_DAYS, CONSTS.WARMUP_DAYS + len(attrs), dtype=np.int64))
    frame.insert(0, 'state', state)
    frame.insert(0, 'drug', drug)
    return frame


def extract_all(cube: CountCube, threads: Optional[int] = None) -> pd.DataFrame:
    """Feature table over every drug x state pair of the cube, canonically ordered."""
    frames = parallel_map(_pair_frame, cube.iter_series(), threads=threads)
    if not frames:
        return pd.DataFrame(columns=FEATURE_COLUMNS)
    table = canonical_sort(pd.concat(frames, ignore_index=True))
    logger.info(f"Extracted {len(table)} feature rows over {len(frames)} (drug, state) series")
    return table


def first_recall_days(recalls: Iterable[RecallRecord]) -> Dict[Tuple[str, str], int]:
    first: Dict[Tuple[str, str], int] = {}
    for recall in recalls:
        for state in recall.states:
            key = (recall.drug, state)
            first[key] = min(first.get(key, recall.day), recall.day)
    return first


def before_first_recall(rows: pd.DataFrame, recalls: Iterable[RecallRecord]) -> pd.Series:
    """Boolean mask of rows strictly before the first recall of their (drug, state)."""
    first = first_recall_days(recalls)
    if not first or rows.empty:
        return pd.Series(True, index=rows.index)
    keys = sorted(first)
    limits = pd.Series([first[k] for k in keys], dtype=float,
                       index=pd.MultiIndex.from_tuples(keys, names=['drug', 'state']))
    keyed = pd.MultiIndex.from_arrays([rows['drug'], rows['state']])
    row_limits = limits.reindex(keyed).to_numpy()
    return pd.Series(np.isnan(row_limits) | (rows['day'].to_numpy() < row_limits), index=rows.index)


def apply_censoring(rows: pd.DataFrame, recalls: Iterable[RecallRecord]) -> pd.DataFrame:
    """Drop every row on or after the first recall day of its (drug, state)."""
    keep = before_first_recall(rows, recalls)
    censored = rows[keep.to_numpy()].reset_index(drop=True)
    logger.info(f"Censoring removed {len(rows) - len(censored)} of {len(rows)} feature rows")
    return censored


def write_features(table: pd.DataFrame, path_or_buf, extra_columns: Sequence[str] = ()):
    table[FEATURE_COLUMNS + list(extra_columns)].to_csv(path_or_buf, index=False)


def read_features(path_or_buf, extra_columns: Sequence[str] = ()) -> pd.DataFrame:
    try:
        table = pd.read_csv(path_or_buf, dtype={'drug': str, 'state': str}, float_precision='round_trip',
                            keep_default_na=False, na_values=[''])
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputFormatError(f"Unreadable feature table: {e}")
    expected = FEATURE_COLUMNS + list(extra_columns)
    missing = [c for c in expected if c not in table.columns]
    if missing:
        raise InputFormatError(f"Feature table is missing columns {missing}")
    if not np.all(np.isfinite(table[CONSTS.ATTRIBUTE_NAMES].to_numpy(dtype=float))):
        raise InputFormatError('Feature table holds non-finite attributes')
    return table[expected]
