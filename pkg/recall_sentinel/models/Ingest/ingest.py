import io
import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd
import ujson
from pydantic import ValidationError

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.cli_models.generic_models import RowError
from recall_sentinel.cli.exceptions import ConfigurationError, InputFormatError
from recall_sentinel.cli.worker.tasks import parallel_map
from recall_sentinel.models.Ingest.cube import CountCube
from recall_sentinel.models.Ingest.records import QueryRecord, RecallRecord, StudyWindow, strict_date
from recall_sentinel.models.Lexicon import (DrugLexicon, DrugEntry, SymptomLexicon, contains_symptom,
                                            normalize_text)

logger = logging.getLogger(__name__)

SHARD_SIZE = 50_000


def describe_validation_error(e: ValidationError) -> str:
    return '; '.join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())


def _json_lines(stream, source: str):
    """Yield (line number, decoded object or RowError) for every non-blank line."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    try:
        for line_no, line in enumerate(stream, start=1):
            if isinstance(line, bytes):
                line = line.decode('utf-8')
            line = line.strip()
            if not line:
                continue
            try:
                obj = ujson.loads(line)
            except ValueError as e:
                yield line_no, RowError(line=line_no, reason=f"invalid JSON: {e}")
                continue
            if not isinstance(obj, dict):
                yield line_no, RowError(line=line_no, reason=f"expected a JSON object, got {type(obj).__name__}")
                continue
            yield line_no, obj
    except (OSError, UnicodeDecodeError) as e:
        raise InputFormatError(f"Unreadable stream {source}: {e}")


def parse_query_log(stream, window: Optional[StudyWindow] = None,
                    source='<query log>') -> Tuple[List[QueryRecord], List[RowError]]:
    window = window or StudyWindow()
    universe = set(window.states)
    records, errors = [], []
    for line_no, obj in _json_lines(stream, source):
        if isinstance(obj, RowError):
            errors.append(obj)
            continue
        try:
            record = QueryRecord(**obj)
        except ValidationError as e:
            errors.append(RowError(line=line_no, reason=describe_validation_error(e)))
            continue
        except TypeError as e:
            errors.append(RowError(line=line_no, reason=str(e)))
            continue
        if not window.contains(record.date):
            errors.append(RowError(line=line_no, reason=f"date {record.date} outside study window "
                                                        f"{window.start} + {window.n_days} days"))
            continue
        if record.state not in universe:
            errors.append(RowError(line=line_no, reason=f"state {record.state!r} not in the configured state set"))
            continue
        record.day = window.day_of(record.date)
        records.append(record)

    for err in errors:
        logger.debug(f"{source} line {err.line}: {err.reason}")
    logger.info(f"Parsed {len(records)} queries from {source}, {len(errors)} rejected rows")
    return records, errors


def _distribution_states(distribution, universe: Sequence[str]) -> Tuple[List[str], bool]:
    if isinstance(distribution, str):
        if distribution.strip().lower() == CONSTS.NATIONWIDE:
            return list(universe), True
        raise ValueError(f"distribution must be {CONSTS.NATIONWIDE!r} or a list of state codes, got {distribution!r}")
    if not isinstance(distribution, list) or not distribution:
        raise ValueError(f"distribution must be {CONSTS.NATIONWIDE!r} or a non-empty list of state codes")
    states = []
    for code in distribution:
        if not isinstance(code, str) or code.strip().upper() not in universe:
            raise ValueError(f"unknown state code {code!r}")
        states.append(code.strip().upper())
    states = sorted(set(states))
    return states, states == sorted(universe)


def parse_recall_file(stream, window: Optional[StudyWindow] = None,
                      source='<recall file>') -> Tuple[List[RecallRecord], List[RowError]]:
    """
    Recall JSONL to records. "nationwide" expands to the window's state set, and
    a (drug, date, state) triple seen before is dropped from later rows.
    """
    window = window or StudyWindow()
    universe = sorted(window.states)
    records, errors = [], []
    seen = set()
    for line_no, obj in _json_lines(stream, source):
        if isinstance(obj, RowError):
            errors.append(obj)
            continue
        try:
            states, nationwide = _distribution_states(obj.get('distribution'), universe)
            initiation = strict_date(obj.get('initiation_date'))
            record = RecallRecord(drug=normalize_text(str(obj.get('drug') or '')),
                                  initiation_date=initiation,
                                  day=window.day_of(initiation),
                                  states=states,
                                  classification=str(obj.get('classification', '')),
                                  rx_otc=obj.get('rx_otc'),
                                  nationwide=nationwide)
        except ValidationError as e:
            errors.append(RowError(line=line_no, reason=describe_validation_error(e)))
            continue
        except ValueError as e:
            errors.append(RowError(line=line_no, reason=str(e)))
            continue
        if not record.drug:
            errors.append(RowError(line=line_no, reason='drug name is empty'))
            continue
        if record.initiation_date < window.start:
            errors.append(RowError(line=line_no, reason=f"initiation_date {record.initiation_date} precedes study start {window.start}"))
            continue

        fresh = [s for s in record.states if (record.drug, record.initiation_date, s) not in seen]
        if not fresh:
            logger.debug(f"{source} line {line_no}: duplicate recall collapsed")
            continue
        seen.update((record.drug, record.initiation_date, s) for s in fresh)
        if len(fresh) < len(record.states):
            record = record.copy(update={'states': fresh, 'nationwide': False})
        records.append(record)

    for err in errors:
        logger.debug(f"{source} line {err.line}: {err.reason}")
    logger.info(f"Parsed {len(records)} recalls from {source}, {len(errors)} rejected rows")
    return records, errors


def _count_shard(shard: List[QueryRecord], lexicon: DrugLexicon, symptoms: Optional[SymptomLexicon]) -> Counter:
    counts = Counter()
    matched: Dict[str, Tuple[frozenset, bool]] = {}
    for record in shard:
        hit = matched.get(record.text)
        if hit is None:
            text = normalize_text(record.text)
            drugs = frozenset(lexicon.matcher.find(text))
            has_symptom = bool(drugs) and symptoms is not None and contains_symptom(text, symptoms)
            hit = matched[record.text] = (drugs, has_symptom)
        drugs, has_symptom = hit
        for drug in drugs:
            counts[(drug, record.state, record.day, 0)] += 1
            if has_symptom:
                counts[(drug, record.state, record.day, 1)] += 1
    return counts


def build_count_cube(records: Sequence[QueryRecord], drugs: Union[DrugLexicon, Sequence[DrugEntry]],
                     symptoms: Optional[SymptomLexicon], window: Optional[StudyWindow] = None,
                     threads: Optional[int] = None) -> CountCube:
    """Shard the records, count each shard in parallel, and sum the shards."""
    window = window or StudyWindow()
    lexicon = drugs if isinstance(drugs, DrugLexicon) else DrugLexicon(drugs)
    shards = [records[i:i + SHARD_SIZE] for i in range(0, len(records), SHARD_SIZE)]
    partials = parallel_map(lambda shard: _count_shard(shard, lexicon, symptoms), shards, threads=threads)

    merged = Counter()
    for partial in partials:
        merged.update(partial)
    cells: Dict[Tuple[str, str, int], List[int]] = {}
    for (drug, state, day, channel), n in merged.items():
        cells.setdefault((drug, state, day), [0, 0])[channel] += n

    cube = CountCube.from_counts({k: tuple(v) for k, v in cells.items()}, n_days=window.n_days,
                                 rx_otc=lexicon.rx_otc, states=window.states)
    logger.info(f"Built count cube: {len(cube)} non-empty cells from {len(records)} queries")
    return cube


def filter_drugs(cube: CountCube, min_queries: int = CONSTS.DEFAULT_MIN_QUERIES) -> CountCube:
    if min_queries < 0:
        raise ConfigurationError(f"min_queries must be non-negative, got {min_queries}")
    if min_queries == 0:
        return cube
    totals = cube.drug_totals()
    keep = totals[totals >= min_queries].index
    logger.info(f"Drug volume filter (>= {min_queries} queries): kept {len(keep)} of {len(totals)} drugs")
    return cube.restrict_drugs(keep)


def recalls_per_state(recalls: Iterable[RecallRecord], states: Sequence[str] = CONSTS.US_STATES) -> pd.DataFrame:
    """Per-state recall counts, leaving out recalls applied to every state."""
    counts = Counter()
    for recall in recalls:
        if not recall.nationwide:
            counts.update(recall.states)
    return pd.DataFrame({'state': sorted(states), 'recall_count': [counts.get(s, 0) for s in sorted(states)]})
