import numpy as np
import pytest
import statsmodels.api as sm
from scipy.stats import rankdata, spearmanr

from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.Evaluation import rank_regression, spearman


def test_rank_regression_equals_ols_on_ranks():
    rng = np.random.default_rng(0)
    x1 = rng.standard_normal(30)
    x2 = rng.standard_normal(30)
    y = -2.0 * x1 + 0.5 * x2 + rng.standard_normal(30)
    result = rank_regression(y, {'x1': x1, 'x2': x2})
    fit = sm.OLS(rankdata(y), sm.add_constant(np.column_stack([rankdata(x1), rankdata(x2)]))).fit()
    np.testing.assert_allclose(result.slopes, fit.params[1:], rtol=1e-10)
    np.testing.assert_allclose(result.std_errors, fit.bse[1:], rtol=1e-10)
    np.testing.assert_allclose(result.p_values, fit.pvalues[1:], rtol=1e-8)
    assert result.r_squared == pytest.approx(fit.rsquared)
    assert result.model_p_value == pytest.approx(fit.f_pvalue)
    assert result.predictors == ['x1', 'x2'] and result.n == 30
    assert result.row('x1')['slope'] < 0 and result.row('x1')['p_value'] < 0.001


def test_rank_regression_is_invariant_to_monotone_transforms():
    rng = np.random.default_rng(1)
    x = rng.uniform(1, 10, 12)
    y = x + rng.standard_normal(12)
    plain = rank_regression(y, {'x': x})
    warped = rank_regression(np.exp(y), {'x': np.log(x)})
    assert plain.slopes == pytest.approx(warped.slopes)
    assert plain.p_values == pytest.approx(warped.p_values)


def test_rank_regression_degenerate_inputs():
    with pytest.raises(InsufficientDataError):
        rank_regression([1.0, 2.0], {'x': [1.0, 2.0]})
    with pytest.raises(InsufficientDataError):
        rank_regression([1.0, 2.0, 3.0], {'a': [1.0, 2.0, 3.0], 'b': [3.0, 2.0, 1.0]})
    with pytest.raises(InsufficientDataError):
        rank_regression([1.0, 2.0, 3.0, 4.0, 5.0], {'a': [1, 2, 3, 4, 5], 'b': [2, 4, 6, 8, 10]})
    with pytest.raises(InsufficientDataError):
        rank_regression([1.0] * 5, {'a': [1, 2, 3, 4, 5]})


def test_spearman_matches_scipy():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(25)
    y = x ** 3 + 0.5 * rng.standard_normal(25)
    rho, p = spearman(x, y)
    expected = spearmanr(x, y)
    assert rho == pytest.approx(expected[0]) and p == pytest.approx(expected[1])
    assert spearman([1, 2, 3, 4], [10, 20, 30, 40])[0] == pytest.approx(1.0)


def test_spearman_undefined_cases():
    with pytest.raises(InsufficientDataError):
        spearman([1, 2], [3, 4])
    with pytest.raises(InsufficientDataError):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])
