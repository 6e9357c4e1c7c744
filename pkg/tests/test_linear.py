import logging
from itertools import combinations

import numpy as np
import pytest

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.Ensemble import fit_linear, interaction_map, solve_ridge, term_attributes


def test_interaction_map_layout():
    x = np.array([2.0, 3.0, 5.0])
    np.testing.assert_allclose(interaction_map(x), [1, 2, 3, 5, 6, 10, 15])
    assert interaction_map(np.zeros(CONSTS.N_ATTRIBUTES)).shape == (CONSTS.N_TERMS,)
    assert CONSTS.N_TERMS == 211


def test_interaction_map_rows():
    X = np.random.default_rng(0).standard_normal((4, 20))
    phi = interaction_map(X)
    assert phi.shape == (4, 211)
    for i in range(4):
        expected = [1.0, *X[i], *(X[i, a] * X[i, b] for a, b in combinations(range(20), 2))]
        np.testing.assert_allclose(phi[i], expected, rtol=1e-12)


def test_interaction_map_rejects_non_finite():
    with pytest.raises(ValueError):
        interaction_map([1.0, np.nan])


def test_term_attributes():
    terms = term_attributes(3)
    assert terms == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    assert len(term_attributes()) == 211


def test_solve_ridge_zero_lambda_is_least_squares():
    rng = np.random.default_rng(1)
    phi = np.column_stack([np.ones(50), rng.standard_normal((50, 4))])
    y = rng.standard_normal(50)
    np.testing.assert_allclose(solve_ridge(phi, y, 0.0), np.linalg.lstsq(phi, y, rcond=None)[0], atol=1e-10)


def test_solve_ridge_leaves_bias_unpenalized():
    phi = np.column_stack([np.ones(20), np.zeros(20)])
    y = np.full(20, 3.0)
    w = solve_ridge(phi, y, 1e6)
    assert w[0] == pytest.approx(3.0)


def test_fit_linear_recovers_planted_weights(caplog):
    rng = np.random.default_rng(2)
    planted = rng.uniform(0.5, 2.0, size=16) * rng.choice([-1.0, 1.0], size=16)
    labels = (np.arange(400) % 2).astype(int)
    targets = np.where(labels == 1, 1.0, -1.0)
    phi = np.column_stack([np.ones(400), rng.standard_normal((400, 15))])
    # last column solves each row so that phi @ planted hits its target exactly
    phi[:, -1] = (targets - phi[:, :-1] @ planted[:-1]) / planted[-1]
    with caplog.at_level(logging.WARNING):
        member = fit_linear(phi, labels, lam=0.0)
    np.testing.assert_allclose(member.weights, planted, rtol=1e-4)
    # zero residual variance leaves the p-values undefined
    assert not member.stats_valid and member.p_values is None
    assert 'Residual variance vanished' in caplog.text


def test_fit_linear_statistics():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((300, 3))
    labels = (X[:, 0] + 0.3 * rng.standard_normal(300) > 0).astype(int)
    member = fit_linear(interaction_map(X), labels, lam=1e-3, cluster_id=4)
    assert member.stats_valid
    assert member.cluster_id == 4 and member.cluster_size == int((labels == 0).sum())
    assert len(member.p_values) == 7
    assert member.p_values[1] < 1e-10
    assert all(0.0 <= p <= 1.0 for p in member.p_values)


def test_fit_linear_without_residual_dof():
    rng = np.random.default_rng(4)
    phi = interaction_map(rng.standard_normal((10, 20)))
    member = fit_linear(phi, np.array([1, 0] * 5), lam=1e-3)
    assert not member.stats_valid and member.p_values is None
    assert len(member.weights) == 211


def test_fit_linear_needs_both_classes():
    phi = interaction_map(np.random.default_rng(5).standard_normal((10, 3)))
    with pytest.raises(InsufficientDataError):
        fit_linear(phi, np.zeros(10, dtype=int))
