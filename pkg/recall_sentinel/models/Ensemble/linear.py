import logging
import warnings
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel
from scipy import stats
from sklearn.preprocessing import PolynomialFeatures

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.utils import check_finite

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _expander(n_attrs: int) -> PolynomialFeatures:
    return PolynomialFeatures(degree=2, interaction_only=True, include_bias=True).fit(np.zeros((1, n_attrs)))


def interaction_map(x) -> np.ndarray:
    """
    [1, x_1..x_d, x_i*x_j for i<j in lexicographic order]; a single vector maps
    to a vector and a matrix maps row by row.
    """
    x = check_finite(x, 'interaction input')
    single = x.ndim == 1
    X = np.atleast_2d(x)
    phi = _expander(X.shape[1]).transform(X)
    return phi[0] if single else phi


def term_attributes(n_attrs: int = CONSTS.N_ATTRIBUTES) -> List[Tuple[int, ...]]:
    """Attribute indices entering each interaction term; the bias term has none."""
    return [tuple(np.flatnonzero(row)) for row in _expander(n_attrs).powers_]


def solve_ridge(phi: np.ndarray, targets: np.ndarray, lam: float, penalize_bias: bool = False) -> np.ndarray:
    """argmin |phi w - y|^2 + lam |w[1:]|^2 (column 0 is the bias unless penalize_bias)."""
    gram = phi.T @ phi
    penalty = np.full(phi.shape[1], lam, dtype=float)
    if not penalize_bias:
        penalty[0] = 0.0
    gram[np.diag_indices_from(gram)] += penalty
    rhs = phi.T @ targets
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('error', scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(gram, rhs, assume_a='sym')
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError):
        logger.debug('Ridge normal equations ill-conditioned, falling back to least squares')
        return scipy.linalg.lstsq(gram, rhs)[0]


class LinearMember(BaseModel):
    """One cluster's linear predictor over interaction terms."""
    cluster_id: int = 0
    cluster_size: int
    weights: List[float]
    stats_valid: bool = False
    t_stats: Optional[List[Optional[float]]] = None
    p_values: Optional[List[Optional[float]]] = None

    def output(self, phi: np.ndarray) -> np.ndarray:
        return phi @ np.asarray(self.weights)


def coefficient_stats(phi: np.ndarray, targets: np.ndarray, weights: np.ndarray, lam: float,
                      penalize_bias: bool = False) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """t statistics and two-sided p-values at the ridge estimate; None when residual dof < 1 or the fit is exact."""
    n, p = phi.shape
    dof = n - p
    if dof < 1:
        return None
    resid = targets - phi @ weights
    sigma2 = float(resid @ resid) / dof
    if sigma2 <= 1e-12:
        logger.warning(f"Residual variance vanished on {n} rows; coefficient p-values undefined")
        return None
    gram = phi.T @ phi
    penalty = np.full(p, lam, dtype=float)
    if not penalize_bias:
        penalty[0] = 0.0
    gram[np.diag_indices_from(gram)] += penalty
    try:
        inverse = scipy.linalg.inv(gram)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        inverse = scipy.linalg.pinvh(gram)
    se = np.sqrt(np.clip(sigma2 * np.diag(inverse), 0.0, None))
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(se > 0, weights / se, np.where(weights == 0, 0.0, np.inf * np.sign(weights)))
    p_values = 2.0 * stats.t.sf(np.abs(t), dof)
    return t, p_values


def fit_linear(phi, labels, lam: float = CONSTS.DEFAULT_LAMBDA, cluster_id: int = 0,
               cluster_size: Optional[int] = None) -> LinearMember:
    """Ridge least squares on +1/-1 targets; labels are 0/1."""
    phi = check_finite(phi, 'design matrix')
    labels = np.asarray(labels)
    if phi.ndim != 2 or len(phi) != len(labels):
        raise ValueError('Invalid design matrix shape', phi.shape, labels.shape)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise InsufficientDataError(f"fit_linear needs both classes, got {n_pos} positives and {n_neg} negatives")

    targets = np.where(labels == 1, 1.0, -1.0)
    weights = solve_ridge(phi, targets, lam)
    member = LinearMember(cluster_id=cluster_id, cluster_size=n_neg if cluster_size is None else cluster_size,
                          weights=weights.tolist())
    result = coefficient_stats(phi, targets, weights, lam)
    if result is not None:
        t, p_values = result
        member.stats_valid = True
        member.t_stats = [float(v) if np.isfinite(v) else None for v in t]
        member.p_values = [float(v) for v in p_values]
    return member
