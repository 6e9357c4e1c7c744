import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd
import ujson

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.cli_models.generic_models import RowError
from recall_sentinel.cli.cli_models.run_models import RunConfig
from recall_sentinel.cli.exceptions import InputFormatError, MissingArtifactError
from recall_sentinel.models.Ensemble import Ensemble
from recall_sentinel.models.Features import read_features
from recall_sentinel.models.Ingest import CountCube, RecallRecord, StudyWindow, parse_recall_file
from recall_sentinel.models.Labeling import LABELED_COLUMNS
from recall_sentinel.models.Lexicon import DrugLexicon, SymptomLexicon, load_drug_lexicon, load_symptom_lexicon

logger = logging.getLogger(__name__)


def require(path: Path, artifact: str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(artifact, path)
    return path


def study_window(config: RunConfig) -> StudyWindow:
    return StudyWindow(start=config.study_start, n_days=config.n_days, states=config.states)


def read_jsonl(path: Path) -> List[dict]:
    rows = []
    with open(path, encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            if line.strip():
                try:
                    rows.append(ujson.loads(line))
                except ValueError as e:
                    raise InputFormatError(f"{path}: line {line_no}: {e}")
    return rows


def write_jsonl(rows: Iterable[dict], path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for row in rows:
            f.write(ujson.dumps(row, ensure_ascii=False, sort_keys=True) + '\n')


def write_row_errors(errors: Iterable[Tuple[str, RowError]], path: Path):
    write_jsonl(({'source': source, 'line': err.line, 'reason': err.reason} for source, err in errors), path)


def write_csv(frame: pd.DataFrame, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)


def load_drugs(config: RunConfig, required: bool = True) -> Optional[DrugLexicon]:
    path = config.path_for('drugs', CONSTS.DRUG_LEXICON_FILE)
    if not required and not path.is_file():
        return None
    with open(require(path, 'drug lexicon'), encoding='utf-8', newline='') as f:
        return load_drug_lexicon(f, source=str(path))


def load_symptoms(config: RunConfig) -> SymptomLexicon:
    path = require(config.path_for('symptoms', CONSTS.SYMPTOM_LEXICON_FILE), 'symptom lexicon')
    with open(path, encoding='utf-8') as f:
        return load_symptom_lexicon(f, source=str(path))


def load_recalls(config: RunConfig) -> Tuple[List[RecallRecord], List[RowError]]:
    path = require(config.path_for('recalls', CONSTS.RECALL_FILE), 'recall file')
    with open(path, encoding='utf-8') as f:
        return parse_recall_file(f, study_window(config), source=str(path))


def load_cube(config: RunConfig, rx_otc: Optional[Dict[str, str]] = None) -> CountCube:
    path = require(config.path_for('cube', CONSTS.CUBE_FILE), 'count cube')
    return CountCube.from_csv(path, n_days=config.n_days, rx_otc=rx_otc, states=config.states)


def load_features(config: RunConfig) -> pd.DataFrame:
    path = require(config.path_for('features', CONSTS.FEATURE_FILE), 'feature table')
    return read_features(path)


def load_labeled(config: RunConfig) -> pd.DataFrame:
    path = require(config.path_for('labeled', CONSTS.LABELED_FILE), 'labeled dataset')
    table = read_features(path, extra_columns=CONSTS.LABEL_COLUMNS)
    for column in ('classification', 'rx_otc'):
        table[column] = table[column].fillna('').astype(str)
    return table[LABELED_COLUMNS]


def load_model(config: RunConfig) -> Ensemble:
    path = require(config.path_for('model', CONSTS.MODEL_FILE), 'trained model')
    return Ensemble.from_json(path.read_text(encoding='utf-8'))


def save_model(ensemble: Ensemble, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(ensemble.to_json() + '\n', encoding='utf-8')
