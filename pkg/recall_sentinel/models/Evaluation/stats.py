import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import statsmodels.api as sm
from pydantic import BaseModel
from scipy import stats

from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.utils import check_finite

logger = logging.getLogger(__name__)


class RankRegressionResult(BaseModel):
    predictors: List[str]
    slopes: List[float]
    std_errors: List[float]
    p_values: List[float]
    intercept: float
    r_squared: float
    model_p_value: float
    n: int

    def row(self, predictor: str) -> Dict[str, float]:
        i = self.predictors.index(predictor)
        return {'slope': self.slopes[i], 'std_error': self.std_errors[i], 'p_value': self.p_values[i]}


def rank_regression(y: Sequence[float], X: Union[pd.DataFrame, Dict[str, Sequence[float]]]) -> RankRegressionResult:
    """OLS of the average ranks of y on the average ranks of each predictor."""
    X = pd.DataFrame(X)
    y = check_finite(y, 'response')
    n, n_pred = len(y), X.shape[1]
    if n < 3 or n - n_pred - 1 < 1:
        raise InsufficientDataError(f"rank regression with {n_pred} predictors needs at least {n_pred + 2} and 3 observations, got {n}")
    if len(X) != n:
        raise ValueError('response and predictors differ in length', (n, len(X)))

    ranked_y = stats.rankdata(y)
    ranked_X = X.apply(lambda col: stats.rankdata(check_finite(col, col.name)), result_type='broadcast').astype(float)
    design = sm.add_constant(ranked_X.to_numpy(), has_constant='add')
    if np.ptp(ranked_y) == 0:
        raise InsufficientDataError('rank regression response is constant')
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise InsufficientDataError(f"rank-degenerate predictors {list(X.columns)}")

    fit = sm.OLS(ranked_y, design).fit()
    dof = fit.df_resid
    params, bse = np.asarray(fit.params), np.asarray(fit.bse)
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(bse > 0, params / bse, np.where(params == 0, 0.0, np.inf))
    p_values = 2.0 * stats.t.sf(np.abs(t), dof)
    model_p = 0.0 if fit.ssr <= 1e-12 * fit.centered_tss else float(fit.f_pvalue)
    return RankRegressionResult(predictors=[str(c) for c in X.columns], slopes=params[1:].tolist(),
                                std_errors=bse[1:].tolist(), p_values=p_values[1:].tolist(),
                                intercept=float(params[0]), r_squared=float(fit.rsquared),
                                model_p_value=model_p, n=n)


def spearman(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """Rank correlation with the t-approximation p-value."""
    x = check_finite(x, 'x')
    y = check_finite(y, 'y')
    if len(x) != len(y):
        raise ValueError('x and y differ in length', (len(x), len(y)))
    if len(x) < 3:
        raise InsufficientDataError(f"spearman needs at least 3 observations, got {len(x)}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise InsufficientDataError('spearman is undefined for a constant input')
    rho, p = stats.spearmanr(x, y)
    return float(rho), float(p)


def spearman_or_none(x, y) -> Optional[Tuple[float, float]]:
    try:
        return spearman(x, y)
    except InsufficientDataError as e:
        logger.warning(f"Spearman correlation undefined: {e}")
        return None
