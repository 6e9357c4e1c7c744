import json

import pandas as pd
import pytest
import ujson
from typer.testing import CliRunner

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.main import app, run_command

runner = CliRunner()

SMALL = ['--n-drugs', '12', '--n-states', '3', '--n-days', '150', '--n-recalls', '24', '--gamma', '8', '--seed', '3']


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def _payload(result):
    lines = [line for line in result.output.splitlines() if line.startswith('{')]
    return json.loads(lines[-1])


def test_synth_is_byte_identical_across_runs(tmp_path):
    for name in ('a', 'b'):
        result = _invoke('synth', *SMALL, '--out', tmp_path / name)
        assert result.exit_code == 0, result.output
    for name in (CONSTS.QUERY_LOG_FILE, CONSTS.RECALL_FILE, CONSTS.DRUG_LEXICON_FILE, CONSTS.SYMPTOM_LEXICON_FILE,
                 CONSTS.TRUTH_FILE, CONSTS.SYNTH_CONFIG_FILE, CONSTS.RUN_CONFIG_FILE):
        assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes(), name


def test_synth_scales_the_training_cutoff(tmp_path):
    assert _invoke('synth', *SMALL, '--mode', 'cube', '--out', tmp_path).exit_code == 0
    run_config = json.loads((tmp_path / CONSTS.RUN_CONFIG_FILE).read_text())
    assert run_config['n_days'] == 150 and run_config['train_end_day'] == 99
    assert (tmp_path / CONSTS.CUBE_FILE).is_file() and not (tmp_path / CONSTS.QUERY_LOG_FILE).exists()


def test_evaluate_without_model_names_the_artifact(tmp_path):
    result = _invoke('evaluate', '--out', tmp_path)
    assert result.exit_code == CONSTS.EXIT_FAILURE.CODE
    assert 'trained model' in result.output
    assert not (tmp_path / CONSTS.REPORT_FILE).exists()


def test_invalid_config_value_fails(tmp_path):
    result = _invoke('train', '--k', '0', '--out', tmp_path)
    assert result.exit_code == CONSTS.EXIT_FAILURE.CODE
    assert 'invalid configuration' in result.output


def test_run_command_exit_codes(tmp_path):
    assert run_command(['evaluate', '--out', str(tmp_path)]) == CONSTS.EXIT_FAILURE.CODE
    assert run_command(['train', '--bogus']) == CONSTS.EXIT_USAGE.CODE
    assert run_command(['synth', *SMALL, '--mode', 'cube', '--out', str(tmp_path)]) == CONSTS.EXIT_OK.CODE


def test_unknown_flag_is_a_usage_error():
    assert _invoke('score', '--bogus').exit_code == CONSTS.EXIT_USAGE.CODE


def test_convert_writes_native_recalls(tmp_path):
    source = tmp_path / 'enforcement.json'
    source.write_text(ujson.dumps({'results': [
        {'recall_initiation_date': '20150210', 'classification': 'Class I', 'distribution_pattern': 'Nationwide',
         'openfda': {'generic_name': ['IBUPROFEN'], 'product_type': ['HUMAN OTC DRUG']}},
        {'recall_initiation_date': 'soon', 'classification': 'Class II', 'distribution_pattern': 'FL'},
    ]}))
    result = _invoke('convert', source, '--out', tmp_path / 'out')
    assert result.exit_code == 0, result.output
    assert _payload(result)['content'] == {'recalls': 1, 'unmapped': 1}
    rows = [json.loads(line) for line in (tmp_path / 'out' / CONSTS.RECALL_FILE).read_text().splitlines()]
    assert rows[0]['drug'] == 'ibuprofen' and rows[0]['distribution'] == 'nationwide'


def test_convert_rejects_broken_json(tmp_path):
    source = tmp_path / 'broken.json'
    source.write_text('{"results": [')
    assert _invoke('convert', source, '--out', tmp_path).exit_code == CONSTS.EXIT_FAILURE.CODE


@pytest.mark.slow
def test_pipeline_chain(tmp_path):
    steps = [
        ('synth', *SMALL),
        ('ingest', '--min-queries', '0'),
        ('featurize',),
        ('train', '--k', '2', '--horizon', '1'),
        ('score',),
        ('evaluate',),
        ('report',),
    ]
    for step in steps:
        result = _invoke(*step, '--out', tmp_path)
        assert result.exit_code == 0, (step, result.output)

    report = json.loads((tmp_path / CONSTS.REPORT_FILE).read_text())
    assert 0.0 <= report['auc'] <= 1.0 and report['horizon'] == 1
    scores = pd.read_csv(tmp_path / CONSTS.SCORES_FILE)
    assert list(scores.columns[:4]) == ['drug', 'state', 'day', 'score']
    roc = pd.read_csv(tmp_path / CONSTS.ROC_FILE)
    assert roc['fpr'].iloc[0] == 0.0 and roc['tpr'].iloc[-1] == 1.0
    assert len(pd.read_csv(tmp_path / CONSTS.LIFT_CURVE_FILE)) == 100
    assert (tmp_path / 'roc.svg').is_file()
    manifest = json.loads((tmp_path / CONSTS.MANIFEST_FILE).read_text())
    assert {'synth', 'ingest', 'featurize', 'train', 'evaluate'} <= set(manifest)


@pytest.mark.slow
def test_evaluate_keeps_the_model_training_cutoff(tmp_path):
    for step in [('synth', *SMALL, '--mode', 'cube'), ('ingest', '--min-queries', '0'), ('featurize',),
                 ('train', '--k', '2', '--horizon', '1')]:
        result = _invoke(*step, '--out', tmp_path)
        assert result.exit_code == 0, (step, result.output)
    assert json.loads((tmp_path / CONSTS.MODEL_FILE).read_text())['train_end_day'] == 99

    result = _invoke('evaluate', '--train-end-day', '80', '--out', tmp_path)
    assert result.exit_code == CONSTS.EXIT_FAILURE.CODE
    assert 'disagrees' in result.output
    assert not (tmp_path / CONSTS.REPORT_FILE).exists()

    result = _invoke('evaluate', '--train-end-day', '99', '--out', tmp_path)
    assert result.exit_code == 0, result.output
    assert _payload(result)['content']['n_test'] == len(pd.read_csv(tmp_path / CONSTS.LABELED_FILE).query('day >= 99'))


def test_pruning_is_an_evaluation_time_flag():
    assert '--prune' in _invoke('sweep', '--help').output
    train_help = _invoke('train', '--help').output
    assert '--prune' not in train_help and 'pruning' in train_help
