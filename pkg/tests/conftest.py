import datetime

import numpy as np
import pandas as pd
import pytest

from recall_sentinel.cli import CONSTS
from recall_sentinel.models.Ingest import RecallRecord, StudyWindow
from recall_sentinel.models.Lexicon import DrugEntry, DrugLexicon, SymptomLexicon

STATES = ['CA', 'NY', 'TX']


@pytest.fixture(autouse=True)
def serial_workers(monkeypatch):
    monkeypatch.setenv('RECALL_SENTINEL_THREADS', '1')


@pytest.fixture
def window():
    return StudyWindow(start=datetime.date(2015, 1, 1), n_days=120, states=STATES)


@pytest.fixture
def drug_lexicon():
    return DrugLexicon([DrugEntry(canonical_name='acetaminophen', brand_names=['Tylenol'], rx_otc='OTC'),
                        DrugEntry(canonical_name='atorvastatin', brand_names=['Lipitor'], rx_otc='RX'),
                        DrugEntry(canonical_name='ibuprofen', brand_names=['Advil', 'Motrin IB'], rx_otc='OTC')])


@pytest.fixture
def symptom_lexicon():
    return SymptomLexicon(phrases=['headache', 'muscle pain', 'rash'])


def make_recall(drug, day, states, classification='II', rx_otc=None, start=CONSTS.STUDY_START):
    return RecallRecord(drug=drug, initiation_date=start + datetime.timedelta(days=day), day=day,
                        states=list(states), classification=classification, rx_otc=rx_otc)


def feature_grid(drugs, states, days, seed=0) -> pd.DataFrame:
    """Random feature table over the full drug x state x day grid, canonically ordered."""
    rng = np.random.default_rng(seed)
    keys = [(d, s, day) for d in sorted(drugs) for s in sorted(states) for day in days]
    table = pd.DataFrame(keys, columns=CONSTS.KEY_COLUMNS)
    attrs = pd.DataFrame(rng.standard_normal((len(keys), CONSTS.N_ATTRIBUTES)), columns=CONSTS.ATTRIBUTE_NAMES)
    return pd.concat([table, attrs], axis=1)


def labeled_frame(X: np.ndarray, labels, day_start: int = 0) -> pd.DataFrame:
    """Labeled examples over given attribute rows, one synthetic key per row."""
    n = len(X)
    table = pd.DataFrame({'drug': [f'd{i:05d}' for i in range(n)], 'state': 'CA',
                          'day': np.arange(day_start, day_start + n)})
    table = pd.concat([table, pd.DataFrame(X, columns=CONSTS.ATTRIBUTE_NAMES)], axis=1)
    table['label'] = np.asarray(labels, dtype=int)
    table['horizon'] = 1
    table['classification'] = ''
    table['rx_otc'] = ''
    return table
