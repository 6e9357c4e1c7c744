import logging
from pathlib import Path
from typing import Optional

import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import ConfigOption, OutOption
from recall_sentinel.cli.data.artifacts import load_cube, load_drugs, load_recalls
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import record_manifest, resolve_config, succeed
from recall_sentinel.models.Features import apply_censoring, extract_all, write_features

logger = logging.getLogger(__name__)


@command_error_handler
def featurize(cube: Optional[Path] = typer.Option(None, '--cube', help='Count cube CSV.'),
              recalls: Optional[Path] = typer.Option(None, '--recalls', help='Recall JSONL used for censoring.'),
              config: Optional[Path] = ConfigOption,
              out: Path = OutOption):
    """Compute the 20 attributes for every (drug, state, day) past warm-up, censored at first recalls."""
    run = resolve_config(config, out, cube=cube, recalls=recalls)
    lexicon = load_drugs(run, required=False)
    table = extract_all(load_cube(run, rx_otc=lexicon.rx_otc if lexicon is not None else None))
    inputs = [run.path_for('cube', CONSTS.CUBE_FILE)]

    recall_path = run.path_for('recalls', CONSTS.RECALL_FILE)
    if recall_path.is_file():
        recall_records, _ = load_recalls(run)
        table = apply_censoring(table, recall_records)
        inputs.append(recall_path)
    else:
        logger.warning(f"No recall file at {recall_path}; feature rows are not censored")

    out_dir = Path(run.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_features(table, out_dir / CONSTS.FEATURE_FILE)
    record_manifest(run, 'featurize', inputs, [out_dir / CONSTS.FEATURE_FILE])
    return succeed('Feature table written', {'rows': len(table)})
