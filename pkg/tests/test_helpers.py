import json

import numpy as np
import pytest

from recall_sentinel.cli.exceptions import ConfigurationError
from recall_sentinel.cli.helpers import dump_json, round_nested_dict_list, split_day


def test_round_nested_dict_list_rounds_and_drops_non_finite():
    payload = {'auc': 0.123456789, 'curve': [(0.1111111, np.float64(np.nan)), {'lift': np.inf}],
               'n': np.int64(7), 'name': 'x'}
    rounded = round_nested_dict_list(payload, 3)
    assert rounded == {'auc': 0.123, 'curve': [[0.111, None], {'lift': None}], 'n': 7, 'name': 'x'}
    assert payload['auc'] == 0.123456789


def test_dump_json_is_sorted_and_strict(tmp_path):
    path = tmp_path / 'nested' / 'report.json'
    dump_json({'b': float('nan'), 'a': 1.23456789}, path, decimal=4)
    text = path.read_text()
    assert json.loads(text) == {'a': 1.2346, 'b': None}
    assert text.index('"a"') < text.index('"b"')


def test_split_day_prefers_stored_cutoff():
    assert split_day(240, None, 100) == 240
    assert split_day(240, 240, 100) == 240


def test_split_day_without_stored_cutoff():
    assert split_day(None, 180, 240) == 180
    assert split_day(None, None, 240) == 240


def test_split_day_rejects_conflicting_flag():
    with pytest.raises(ConfigurationError, match='disagrees'):
        split_day(240, 200, 240)
