import logging
from pathlib import Path
from typing import Optional

import pandas as pd
import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import ConfigOption, OutOption, PruneOption, overrides
from recall_sentinel.cli.data.artifacts import load_features, load_labeled, load_model, write_csv
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import record_manifest, resolve_config, succeed
from recall_sentinel.models.Evaluation import attribute_matrix

logger = logging.getLogger(__name__)


@command_error_handler
def score(model: Optional[Path] = typer.Option(None, '--model', help='Trained model JSON.'),
          features: Optional[Path] = typer.Option(None, '--features',
                                                  help='Score this feature table instead of the labeled dataset.'),
          config: Optional[Path] = ConfigOption,
          prune: Optional[int] = PruneOption,
          out: Path = OutOption):
    """Score feature rows with the max-fused ensemble."""
    run = resolve_config(config, out, model=model, features=features, **overrides(prune=prune))
    ensemble = load_model(run)
    if features is not None or not run.path_for('labeled', CONSTS.LABELED_FILE).is_file():
        table, source = load_features(run), run.path_for('features', CONSTS.FEATURE_FILE)
    else:
        table, source = load_labeled(run), run.path_for('labeled', CONSTS.LABELED_FILE)

    scores = ensemble.predict(attribute_matrix(table), run.prune_m) if len(table) else []
    scored = pd.DataFrame({'drug': table['drug'], 'state': table['state'], 'day': table['day'], 'score': scores})
    if 'label' in table:
        scored['label'] = table['label']
    out_dir = Path(run.out)
    write_csv(scored, out_dir / CONSTS.SCORES_FILE)
    record_manifest(run, 'score', [run.path_for('model', CONSTS.MODEL_FILE), source], [out_dir / CONSTS.SCORES_FILE])
    return succeed('Scores written', {'rows': len(scored), 'prune_m': run.prune_m})
