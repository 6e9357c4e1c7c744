import numpy as np
import pytest

from conftest import feature_grid, make_recall
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.Features import apply_censoring
from recall_sentinel.models.Labeling import (LABELED_COLUMNS, label_examples, positive_rate, post_recall_exclusion,
                                             prepare_examples, split_by_time)

DAYS = range(49, 100)


def test_label_examples_marks_exact_horizon():
    rows = feature_grid(['a', 'b'], ['CA', 'NY'], DAYS)
    recalls = [make_recall('a', 70, ['CA'], classification='I', rx_otc='RX')]
    labeled = label_examples(apply_censoring(rows, recalls), recalls, horizon=3, n_days=100)
    positives = labeled[labeled['label'] == 1]
    assert positives[['drug', 'state', 'day']].values.tolist() == [['a', 'CA', 67]]
    assert positives['classification'].tolist() == ['I']
    assert positives['rx_otc'].tolist() == ['RX']
    assert set(labeled.loc[labeled['label'] == 0, 'classification']) == {''}
    assert list(labeled.columns) == LABELED_COLUMNS


def test_label_examples_drops_rows_past_study_end():
    rows = feature_grid(['a'], ['CA'], DAYS)
    labeled = label_examples(rows, [], horizon=5, n_days=100)
    assert labeled['day'].max() == 94
    assert labeled['label'].sum() == 0


def test_label_examples_uses_lexicon_class_when_recall_has_none():
    rows = feature_grid(['a'], ['CA'], DAYS)
    recalls = [make_recall('a', 60, ['CA'])]
    labeled = label_examples(rows, recalls, horizon=1, n_days=100, rx_otc={'a': 'OTC'})
    assert labeled.loc[labeled['label'] == 1, 'rx_otc'].tolist() == ['OTC']


def test_label_examples_rejects_bad_horizon():
    rows = feature_grid(['a'], ['CA'], DAYS)
    with pytest.raises(ConfigurationError):
        label_examples(rows, [], horizon=0, n_days=100)
    with pytest.raises(ConfigurationError):
        label_examples(rows, [], horizon=41, n_days=100)


def test_only_first_recall_produces_positive():
    rows = feature_grid(['a'], ['CA'], DAYS)
    recalls = [make_recall('a', 80, ['CA']), make_recall('a', 60, ['CA'])]
    labeled = prepare_examples(rows, recalls, horizon=2, n_days=100)
    assert labeled.loc[labeled['label'] == 1, 'day'].tolist() == [58]
    assert labeled['day'].max() == 59


def test_randomized_schedules_never_leak_past_first_recall():
    rng = np.random.default_rng(11)
    drugs, states = ['a', 'b', 'c'], ['CA', 'NY', 'TX']
    rows = feature_grid(drugs, states, DAYS)
    for _ in range(50):
        recalls = [make_recall(str(rng.choice(drugs)), int(rng.integers(49, 110)),
                               sorted(rng.choice(states, size=int(rng.integers(1, 4)), replace=False)))
                   for _ in range(int(rng.integers(1, 8)))]
        horizon = int(rng.integers(1, 11))
        labeled = prepare_examples(rows, recalls, horizon, n_days=100)
        first = {}
        for r in recalls:
            for s in r.states:
                first[(r.drug, s)] = min(first.get((r.drug, s), r.day), r.day)
        for drug, state, day, label in labeled[['drug', 'state', 'day', 'label']].itertuples(index=False):
            limit = first.get((drug, state))
            assert limit is None or day < limit
            assert (label == 1) == (limit is not None and day + horizon == limit)
        assert (labeled['day'] + horizon < 100).all()


def test_post_recall_exclusion_removes_leaked_rows():
    rows = feature_grid(['a'], ['CA'], DAYS)
    recalls = [make_recall('a', 60, ['CA'])]
    labeled = label_examples(rows, recalls, horizon=1, n_days=100)
    kept = post_recall_exclusion(labeled, recalls)
    assert kept['day'].max() == 59
    assert len(kept) == 11


def test_split_by_time():
    rows = label_examples(feature_grid(['a'], ['CA'], DAYS), [], horizon=1, n_days=100)
    split = split_by_time(rows, 70)
    assert split.train['day'].max() == 69 and split.test['day'].min() == 70
    assert len(split.train) + len(split.test) == len(rows)
    with pytest.raises(InsufficientDataError):
        split_by_time(rows, 49)
    with pytest.raises(InsufficientDataError):
        split_by_time(rows, 99)


def test_positive_rate():
    rows = feature_grid(['a', 'b'], ['CA'], DAYS)
    labeled = prepare_examples(rows, [make_recall('a', 70, ['CA'])], horizon=1, n_days=100)
    assert positive_rate(labeled) == pytest.approx(1 / len(labeled))
    assert np.isnan(positive_rate(labeled.iloc[0:0]))
