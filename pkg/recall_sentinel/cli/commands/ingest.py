import logging
from pathlib import Path
from typing import Optional

import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import ConfigOption, MinQueriesOption, OutOption
from recall_sentinel.cli.data.artifacts import (load_cube, load_drugs, load_recalls, load_symptoms, require,
                                                study_window, write_row_errors)
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import record_manifest, resolve_config, succeed
from recall_sentinel.models.Ingest import build_count_cube, filter_drugs, parse_query_log

logger = logging.getLogger(__name__)


@command_error_handler
def ingest(queries: Optional[Path] = typer.Option(None, '--queries', help='Query log JSONL.'),
           drugs: Optional[Path] = typer.Option(None, '--drugs', help='Drug lexicon CSV.'),
           symptoms: Optional[Path] = typer.Option(None, '--symptoms', help='Symptom lexicon.'),
           recalls: Optional[Path] = typer.Option(None, '--recalls', help='Recall JSONL.'),
           config: Optional[Path] = ConfigOption,
           min_queries: Optional[int] = MinQueriesOption,
           out: Path = OutOption):
    """Aggregate a query log (or an existing count cube) into the filtered count cube."""
    run = resolve_config(config, out, queries=queries, drugs=drugs, symptoms=symptoms, recalls=recalls,
                         min_queries=min_queries)
    window = study_window(run)
    lexicon = load_drugs(run)
    query_path = run.path_for('queries', CONSTS.QUERY_LOG_FILE)
    cube_path = run.path_for('cube', CONSTS.CUBE_FILE)
    inputs = [run.path_for('drugs', CONSTS.DRUG_LEXICON_FILE)]
    errors = []

    if query_path.is_file() or run.queries is not None:
        symptom_lexicon = load_symptoms(run)
        inputs += [require(query_path, 'query log'), run.path_for('symptoms', CONSTS.SYMPTOM_LEXICON_FILE)]
        with open(query_path, encoding='utf-8') as f:
            records, query_errors = parse_query_log(f, window, source=str(query_path))
        errors += [(str(query_path), e) for e in query_errors]
        cube = build_count_cube(records, lexicon, symptom_lexicon, window)
    else:
        logger.info(f"No query log at {query_path}; filtering the existing count cube")
        inputs.append(require(cube_path, 'query log or count cube'))
        cube = load_cube(run, rx_otc=lexicon.rx_otc)

    recall_path = run.path_for('recalls', CONSTS.RECALL_FILE)
    n_recalls = None
    if recall_path.is_file():
        recall_records, recall_errors = load_recalls(run)
        n_recalls = len(recall_records)
        errors += [(str(recall_path), e) for e in recall_errors]
        inputs.append(recall_path)

    cube = filter_drugs(cube, run.min_queries)
    out_dir = Path(run.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cube.to_csv(out_dir / CONSTS.CUBE_FILE)
    write_row_errors(errors, out_dir / CONSTS.INGEST_ERRORS_FILE)
    record_manifest(run, 'ingest', inputs, [out_dir / CONSTS.CUBE_FILE, out_dir / CONSTS.INGEST_ERRORS_FILE])
    return succeed('Count cube written', {'cells': len(cube), 'drugs_kept': len(cube.drugs),
                                          'row_errors': len(errors), 'recalls': n_recalls})
