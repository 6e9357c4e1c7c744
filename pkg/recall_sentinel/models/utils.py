import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view


def trailing_windows(series: np.ndarray, width: int) -> np.ndarray:
    """Row i holds series[i - width + 1 .. i]; rows start at i = width - 1."""
    series = np.asarray(series, dtype=float)
    if len(series) < width:
        return np.empty((0, width))
    return sliding_window_view(series, width)


def trailing_means(series: np.ndarray, width: int) -> np.ndarray:
    """Mean over the trailing `width` days for every day from width - 1 on."""
    series = np.asarray(series, dtype=float)
    if len(series) < width:
        return np.empty(0)
    csum = np.concatenate(([0.0], np.cumsum(series)))
    return (csum[width:] - csum[:-width]) / width


def ols_slope_weights(length: int) -> np.ndarray:
    """Kernel w with slope = w . y for an OLS fit of y against 0..length-1."""
    x = np.arange(length, dtype=float)
    centered = x - x.mean()
    return centered / np.sum(centered ** 2)


def check_finite(values, name='input'):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"Non-finite values in {name}", values[~np.isfinite(values)][:5])
    return values


def canonical_sort(df: pd.DataFrame, keys=('drug', 'state', 'day')) -> pd.DataFrame:
    return df.sort_values(list(keys), kind='mergesort').reset_index(drop=True)
