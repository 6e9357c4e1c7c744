import logging

import numpy as np
import pytest

from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.Ensemble import kmeans


def _blobs(seed, n_per=60, separation=10.0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [separation, 0.0], [0.0, separation]])
    points = np.vstack([c + rng.standard_normal((n_per, 2)) for c in centers])
    truth = np.repeat(np.arange(3), n_per)
    return points, truth


def _recovers(assignments, truth):
    """Every generating blob maps onto exactly one cluster and vice versa."""
    pairs = set(zip(truth.tolist(), assignments.tolist()))
    return len(pairs) == len(set(truth.tolist())) == len({a for _, a in pairs})


def test_objective_non_increasing():
    rng = np.random.default_rng(1)
    for seed in range(10):
        points = rng.standard_normal((300, 4))
        result = kmeans(points, 7, seed=seed)
        diffs = np.diff(result.history)
        assert np.all(diffs <= 1e-9 * max(result.history))
        assert result.objective == pytest.approx(result.history[-1])


def test_blob_recovery():
    recovered = 0
    for seed in range(20):
        points, truth = _blobs(seed)
        recovered += _recovers(kmeans(points, 3, seed=seed).assignments, truth)
    assert recovered >= 19


def test_deterministic_given_seed():
    points, _ = _blobs(0)
    first, second = kmeans(points, 4, seed=9), kmeans(points, 4, seed=9)
    np.testing.assert_array_equal(first.centroids, second.centroids)
    np.testing.assert_array_equal(first.assignments, second.assignments)


def test_assignments_are_nearest_centroid():
    points = np.random.default_rng(2).standard_normal((200, 3))
    result = kmeans(points, 5, seed=0)
    distances = np.linalg.norm(points[:, None, :] - result.centroids[None, :, :], axis=2)
    np.testing.assert_array_equal(result.assignments, np.argmin(distances, axis=1))
    assert result.sizes.sum() == 200


def test_single_cluster_is_the_mean():
    points = np.random.default_rng(3).standard_normal((50, 2))
    result = kmeans(points, 1, seed=0)
    np.testing.assert_allclose(result.centroids[0], points.mean(axis=0), atol=1e-12)


def test_k_equal_to_n_puts_each_point_alone():
    points = np.arange(10, dtype=float).reshape(5, 2)
    result = kmeans(points, 5, seed=0)
    assert sorted(result.sizes.tolist()) == [1] * 5
    assert result.objective == pytest.approx(0.0)


def test_invalid_k():
    points = np.zeros((3, 2))
    with pytest.raises(ConfigurationError):
        kmeans(points, 0)
    with pytest.raises(InsufficientDataError):
        kmeans(points, 4)


def test_emptied_cluster_is_reseeded(caplog):
    # two distinct locations and k=3 force a duplicate seed whose cluster empties
    points = np.repeat(np.array([[0.0, 0.0], [4.0, 4.0]]), 15, axis=0)
    with caplog.at_level(logging.DEBUG, logger='recall_sentinel.models.Ensemble.kmeans'):
        result = kmeans(points, 3, seed=0)
    assert 'emptied, re-seeded' in caplog.text
    assert np.all(np.isfinite(result.centroids))
    assert result.sizes.sum() == 30
    assert result.objective == pytest.approx(0.0)
    distances = np.linalg.norm(points[:, None, :] - result.centroids[None, :, :], axis=2)
    np.testing.assert_array_equal(result.assignments, np.argmin(distances, axis=1))
