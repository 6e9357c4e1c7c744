import logging
from pathlib import Path
from typing import List, Optional

import pandas as pd
import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import (ConfigOption, KOption, LambdaOption, LiftFractionOption, OutOption,
                                                  PruneOption, SeedOption, TrainEndDayOption, overrides)
from recall_sentinel.cli.data.artifacts import (load_drugs, load_features, load_labeled, load_model, load_recalls,
                                                write_csv)
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import dump_json, record_manifest, resolve_config, split_day, succeed
from recall_sentinel.models.Evaluation import PipelineParams, attribute_matrix, horizon_sweep, prune_sweep
from recall_sentinel.models.Labeling import split_by_time

logger = logging.getLogger(__name__)


@command_error_handler
def sweep(features: Optional[Path] = typer.Option(None, '--features', help='Feature table CSV.'),
          recalls: Optional[Path] = typer.Option(None, '--recalls', help='Recall JSONL.'),
          horizons: Optional[List[int]] = typer.Option(None, '--horizons', help='Horizon grid; repeat the flag.'),
          config: Optional[Path] = ConfigOption,
          k: Optional[int] = KOption,
          lam: Optional[float] = LambdaOption,
          seed: Optional[int] = SeedOption,
          train_end_day: Optional[int] = TrainEndDayOption,
          lift_fraction: Optional[float] = LiftFractionOption,
          prune: Optional[int] = PruneOption,
          out: Path = OutOption):
    """Retrain across the horizon grid and, when a model exists, sweep its pruning level."""
    run = resolve_config(config, out, features=features, recalls=recalls, horizon_grid=horizons or None,
                         **overrides(k=k, lam=lam, seed=seed, train_end_day=train_end_day,
                                     lift_fraction=lift_fraction, prune=prune))
    lexicon = load_drugs(run, required=False)
    recall_records, _ = load_recalls(run)
    params = PipelineParams(n_days=run.n_days, train_end_day=run.train_end_day, max_horizon=run.max_horizon, k=run.k,
                            lam=run.lam, seed=run.seed, lift_fraction=run.lift_fraction, prune_m=run.prune_m)
    result = horizon_sweep(load_features(run), recall_records, params, run.horizon_grid,
                           rx_otc=lexicon.rx_otc if lexicon is not None else None)

    out_dir = Path(run.out)
    inputs = [run.path_for('features', CONSTS.FEATURE_FILE), run.path_for('recalls', CONSTS.RECALL_FILE)]
    outputs = [out_dir / CONSTS.LIFT_VS_N_FILE, out_dir / CONSTS.SWEEP_FILE]
    write_csv(pd.DataFrame([p.dict() for p in result.points],
                           columns=['horizon', 'auc', 'lift', 'positives_in_test', 'positives_in_train']),
              outputs[0])
    payload = {'horizon_sweep': result.dict()}

    model_path = run.path_for('model', CONSTS.MODEL_FILE)
    labeled_path = run.path_for('labeled', CONSTS.LABELED_FILE)
    if model_path.is_file() and labeled_path.is_file():
        ensemble = load_model(run)
        test = split_by_time(load_labeled(run), split_day(ensemble.train_end_day, None, run.train_end_day)).test
        pruning = prune_sweep(ensemble, attribute_matrix(test), test['label'].to_numpy(), run.prune_grid,
                              run.lift_fraction)
        write_csv(pd.DataFrame(pruning.points, columns=['m', 'lift']), out_dir / CONSTS.LIFT_VS_M_FILE)
        payload['prune_sweep'] = pruning.dict()
        inputs += [model_path, labeled_path]
        outputs.append(out_dir / CONSTS.LIFT_VS_M_FILE)
    else:
        logger.info(f"No trained model at {model_path}; pruning sweep skipped")

    dump_json(payload, outputs[1])
    record_manifest(run, 'sweep', inputs, outputs)
    return succeed('Sweep written', {'horizons': [p.horizon for p in result.points],
                                     'predictors': result.predictors,
                                     'lift_slope': result.lift_regression.slopes[0] if result.lift_regression else None,
                                     'lift_p': result.lift_regression.p_values[0] if result.lift_regression else None})
