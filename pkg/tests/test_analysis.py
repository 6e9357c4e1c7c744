import numpy as np
import pytest

from conftest import labeled_frame
from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import ConfigurationError, InsufficientDataError
from recall_sentinel.models.Ensemble import train_ensemble
from recall_sentinel.models.Evaluation import (attribute_matrix, build_report, cluster_usage, lift_at, prune_sweep,
                                               strata_analysis)


@pytest.fixture(scope='module')
def fitted():
    rng = np.random.default_rng(7)
    n_neg, n_pos = 1500, 80
    negatives = rng.standard_normal((n_neg, CONSTS.N_ATTRIBUTES))
    negatives[:500, 2] += 5.0
    positives = rng.standard_normal((n_pos, CONSTS.N_ATTRIBUTES))
    positives[:, 0] += 2.0
    train = labeled_frame(np.vstack([negatives, positives]), np.r_[np.zeros(n_neg), np.ones(n_pos)])
    ensemble = train_ensemble(train, k=4, seed=0, horizon=1)

    test_neg = rng.standard_normal((600, CONSTS.N_ATTRIBUTES))
    test_pos = rng.standard_normal((30, CONSTS.N_ATTRIBUTES))
    test_pos[:, 0] += 2.0
    test = labeled_frame(np.vstack([test_neg, test_pos]), np.r_[np.zeros(600), np.ones(30)], day_start=240)
    positive = test['label'] == 1
    test.loc[positive, 'classification'] = ['I'] * 10 + ['II'] * 20
    test.loc[positive, 'rx_otc'] = ['RX'] * 15 + ['OTC'] * 15
    return train, test, ensemble


def _strata_frame(labels, classification, rx_otc):
    frame = labeled_frame(np.zeros((len(labels), CONSTS.N_ATTRIBUTES)), labels)
    frame['classification'] = classification
    frame['rx_otc'] = rx_otc
    return frame


def test_strata_analysis_hand_computed():
    labels = [1, 1, 1, 1, 0, 0, 0, 0]
    frame = _strata_frame(labels, ['I', 'II', 'II', 'III', '', '', '', ''], ['RX', 'RX', 'OTC', 'RX', '', '', '', ''])
    scores = np.array([9.0, 8.0, 1.0, 0.5, 7.0, 0.1, 0.2, 0.3])
    report = strata_analysis(frame, scores, fraction=0.25)
    assert report.positives == 4 and report.positives_in_top == 2
    classes = {s.stratum: s for s in report.strata['classification']}
    assert classes['I'].top_proportion == 0.5 and classes['I'].overall_proportion == 0.25
    assert classes['I'].relative_likelihood == pytest.approx(1.0)
    assert classes['III'].relative_likelihood == pytest.approx(-1.0)
    rx = {s.stratum: s for s in report.strata['rx_otc']}
    assert rx['RX'].relative_likelihood == pytest.approx(1.0 / 0.75 - 1.0)
    assert rx['UNCLASSIFIED'].overall_count == 0 and rx['UNCLASSIFIED'].relative_likelihood is None


def test_strata_analysis_without_top_positives():
    frame = _strata_frame([0, 0, 0, 1], ['', '', '', 'II'], ['', '', '', 'RX'])
    report = strata_analysis(frame, np.array([4.0, 3.0, 2.0, 1.0]), fraction=0.25)
    assert report.positives_in_top == 0
    assert all(s.top_proportion is None and s.relative_likelihood is None for s in report.strata['classification'])
    with pytest.raises(InsufficientDataError):
        strata_analysis(frame.assign(label=0), np.arange(4.0), fraction=0.25)


def test_prune_sweep_matches_recomputation(fitted):
    _, test, ensemble = fitted
    X, labels = attribute_matrix(test), test['label'].to_numpy()
    sweep = prune_sweep(ensemble, X, labels, fraction=0.05)
    assert [m for m, _ in sweep.points] == list(range(1, len(ensemble.members) + 1))
    for m, lift in sweep.points:
        assert lift == lift_at(ensemble.predict(X, m), labels, 0.05).lift
    assert sweep.points[-1][1] == lift_at(ensemble.predict(X), labels, 0.05).lift
    assert sweep.best_lift == max(lift for _, lift in sweep.points)
    assert sweep.best_m == min(m for m, lift in sweep.points if lift == sweep.best_lift)
    with pytest.raises(ConfigurationError):
        prune_sweep(ensemble, X, labels, m_grid=[0, 1])


def test_cluster_usage(fitted):
    _, test, ensemble = fitted
    usage = cluster_usage(ensemble, attribute_matrix(test))
    outputs = ensemble.member_outputs(attribute_matrix(test))
    assert sum(usage.wins) == len(test)
    assert usage.wins == np.bincount(outputs.argmax(axis=1), minlength=len(ensemble.members)).tolist()
    assert usage.cluster_sizes == ensemble.cluster_sizes


def test_build_report(fitted):
    train, test, ensemble = fitted
    report, roc = build_report(test, ensemble, fraction=0.05, train=train)
    assert report.horizon == 1
    assert report.n_test == 630 and report.positives_test == 30
    assert report.positives_train == 80
    assert report.positive_rate_test == pytest.approx(30 / 630)
    assert report.auc == roc.auc and report.auc > 0.7
    assert report.lift.n_top == 32
    assert len(report.lift_curve) == 100
    assert report.strata.positives == 30
    assert report.prune_sweep.points[-1][1] == report.lift.lift
    assert report.importance is not None and report.importance.n_valid_members >= 1
