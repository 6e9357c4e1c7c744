import json

import numpy as np
import pytest

from conftest import labeled_frame
from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InputFormatError, InsufficientDataError
from recall_sentinel.models.Ensemble import (Ensemble, StandardizationStats, attribute_importance, fit_linear,
                                             interaction_map, predict, train_ensemble)
from recall_sentinel.models.Ensemble.ensemble import _merge_small_clusters


def _two_mode_training(seed=0, n_neg=2000, n_pos=100):
    """Negatives in two modes along attribute 0; positives span both modes and sit high on attribute 1."""
    rng = np.random.default_rng(seed)
    negatives = rng.standard_normal((n_neg, CONSTS.N_ATTRIBUTES)) * 0.5
    negatives[: n_neg // 2, 0] += 6.0
    negatives[n_neg // 2:, 0] -= 6.0
    positives = rng.standard_normal((n_pos, CONSTS.N_ATTRIBUTES)) * 0.5
    positives[: n_pos // 2, 0] += 6.0
    positives[n_pos // 2:, 0] -= 6.0
    positives[:, 1] += 8.0
    X = np.vstack([negatives, positives])
    labels = np.r_[np.zeros(n_neg, dtype=int), np.ones(n_pos, dtype=int)]
    return labeled_frame(X, labels)


def test_two_mode_training_sign_accuracy():
    train = _two_mode_training()
    ensemble = train_ensemble(train, k=2, lam=1e-3, seed=0)
    assert len(ensemble.members) == 2
    assert sorted(ensemble.cluster_sizes) == [1000, 1000]
    scores = ensemble.predict(train[CONSTS.ATTRIBUTE_NAMES].to_numpy())
    accuracy = np.mean((scores > 0) == (train['label'].to_numpy() == 1))
    assert accuracy >= 0.99


def test_members_ordered_by_cluster_size():
    train = _two_mode_training(n_neg=500)
    ensemble = train_ensemble(train, k=5, seed=1)
    sizes = ensemble.cluster_sizes
    assert sizes == sorted(sizes, reverse=True)
    assert sum(sizes) == 500


def test_predict_is_max_over_members():
    train = _two_mode_training()
    ensemble = train_ensemble(train, k=3, seed=2)
    X = train[CONSTS.ATTRIBUTE_NAMES].to_numpy()[:25]
    outputs = ensemble.member_outputs(X)
    np.testing.assert_allclose(ensemble.predict(X), outputs.max(axis=1))
    np.testing.assert_allclose(ensemble.predict(X, prune_m=1), outputs[:, 0])
    phi = interaction_map(ensemble.standardization.transform(X[3]))
    assert predict(ensemble, X[3]) == pytest.approx(max(m.output(phi) for m in ensemble.members))
    with pytest.raises(ConfigurationError):
        ensemble.predict(X, prune_m=4)


def test_predict_ignores_order_within_the_kept_members():
    train = _two_mode_training()
    ensemble = train_ensemble(train, k=4, seed=6)
    X = train[CONSTS.ATTRIBUTE_NAMES].to_numpy()[::7]
    members = ensemble.members
    for m in range(2, len(members) + 1):
        shuffled = ensemble.copy(update={'members': [*members[:m][::-1], *members[m:]]})
        np.testing.assert_allclose(shuffled.predict(X, m), ensemble.predict(X, m), rtol=1e-12, atol=1e-12)


def test_pruned_scores_dominated_by_full_ensemble():
    train = _two_mode_training()
    ensemble = train_ensemble(train, k=4, seed=3)
    X = train[CONSTS.ATTRIBUTE_NAMES].to_numpy()
    for m in range(1, len(ensemble.members)):
        assert np.all(ensemble.predict(X, m) <= ensemble.predict(X, m + 1))


def test_training_needs_positives_and_enough_negatives():
    train = _two_mode_training()
    with pytest.raises(InsufficientDataError):
        train_ensemble(train[train['label'] == 0], k=2)
    with pytest.raises(InsufficientDataError):
        train_ensemble(train, k=2001)


def test_json_round_trip_preserves_predictions():
    train = _two_mode_training()
    ensemble = train_ensemble(train, k=2, seed=0, horizon=3)
    again = Ensemble.from_json(ensemble.to_json())
    X = train[CONSTS.ATTRIBUTE_NAMES].to_numpy()
    np.testing.assert_array_equal(again.predict(X), ensemble.predict(X))
    assert again.to_json() == ensemble.to_json()
    assert again.horizon == 3


def test_from_json_rejects_bad_artifacts():
    with pytest.raises(InputFormatError):
        Ensemble.from_json('{"members": [')
    train = _two_mode_training()
    payload = train_ensemble(train, k=2, seed=0).dict()
    payload['members'][0]['weights'] = payload['members'][0]['weights'][:10]
    with pytest.raises(InputFormatError):
        Ensemble.from_json(json.dumps(payload))


def test_training_is_deterministic():
    train = _two_mode_training()
    first = train_ensemble(train, k=3, seed=5, threads=1)
    second = train_ensemble(train, k=3, seed=5, threads=4)
    assert first.to_json() == second.to_json()


def test_standardization_handles_constant_columns():
    X = np.column_stack([np.arange(5.0), np.full(5, 2.0)])
    stats = StandardizationStats.fit(X)
    Z = stats.transform(X)
    assert np.all(np.isfinite(Z))
    np.testing.assert_allclose(Z[:, 1], 0.0)


def test_merge_small_clusters():
    centroids = np.array([[0.0], [1.0], [10.0]])
    assignments = np.array([0, 0, 0, 1, 2, 2])
    merged = _merge_small_clusters(assignments, centroids)
    assert merged.tolist() == [0, 0, 0, 0, 2, 2]


def _members_with_signal(n_members, seed, planted=True):
    rng = np.random.default_rng(seed)
    members = []
    for i in range(n_members):
        X = rng.standard_normal((400, CONSTS.N_ATTRIBUTES))
        if planted:
            labels = (X[:, 4] + 0.2 * rng.standard_normal(400) > 0.8).astype(int)
        else:
            labels = (rng.random(400) < 0.3).astype(int)
        members.append(fit_linear(interaction_map(X), labels, lam=1e-3, cluster_id=i))
    return members


def test_importance_credits_planted_attribute():
    report = attribute_importance(_members_with_signal(10, seed=0))
    assert report.n_valid_members == 10
    assert report.corrected_alpha == pytest.approx(0.05 / 211)
    row = report.attributes[4]
    assert row.attribute == CONSTS.ATTRIBUTE_NAMES[4]
    assert row.credited_fraction >= 0.9
    assert CONSTS.ATTRIBUTE_NAMES[4] in report.important


def test_importance_on_noise_credits_nothing():
    clean = 0
    for seed in range(20):
        report = attribute_importance(_members_with_signal(20, seed=100 + seed, planted=False))
        clean += not report.important
    assert clean >= 19


def test_importance_needs_valid_members():
    rng = np.random.default_rng(0)
    member = fit_linear(interaction_map(rng.standard_normal((10, CONSTS.N_ATTRIBUTES))), np.array([0, 1] * 5))
    with pytest.raises(InsufficientDataError):
        attribute_importance([member])
