import logging
from pathlib import Path
from typing import Optional

import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import (ConfigOption, HorizonOption, KOption, LambdaOption, OutOption,
                                                  SeedOption, TrainEndDayOption, overrides)
from recall_sentinel.cli.data.artifacts import load_drugs, load_features, load_recalls, save_model, write_csv
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import record_manifest, resolve_config, succeed
from recall_sentinel.models.Ensemble import train_ensemble
from recall_sentinel.models.Labeling import LABELED_COLUMNS, positive_rate, prepare_examples, split_by_time

logger = logging.getLogger(__name__)


@command_error_handler
def train(features: Optional[Path] = typer.Option(None, '--features', help='Feature table CSV.'),
          recalls: Optional[Path] = typer.Option(None, '--recalls', help='Recall JSONL.'),
          config: Optional[Path] = ConfigOption,
          horizon: Optional[int] = HorizonOption,
          k: Optional[int] = KOption,
          lam: Optional[float] = LambdaOption,
          seed: Optional[int] = SeedOption,
          train_end_day: Optional[int] = TrainEndDayOption,
          out: Path = OutOption):
    """Label at the horizon, split by time and fit the cluster-bagged ensemble on the training days.

    Every member is kept; pruning to the largest clusters happens when evaluate, sweep or score run with --prune.
    """
    run = resolve_config(config, out, features=features, recalls=recalls,
                         **overrides(horizon=horizon, k=k, lam=lam, seed=seed, train_end_day=train_end_day))
    lexicon = load_drugs(run, required=False)
    recall_records, _ = load_recalls(run)
    labeled = prepare_examples(load_features(run), recall_records, run.horizon, n_days=run.n_days,
                               rx_otc=lexicon.rx_otc if lexicon is not None else None, max_horizon=run.max_horizon)
    split = split_by_time(labeled, run.train_end_day)
    ensemble = train_ensemble(split.train, k=run.k, lam=run.lam, seed=run.seed, horizon=run.horizon,
                              train_end_day=run.train_end_day)

    out_dir = Path(run.out)
    write_csv(labeled[LABELED_COLUMNS], out_dir / CONSTS.LABELED_FILE)
    save_model(ensemble, out_dir / CONSTS.MODEL_FILE)
    record_manifest(run, 'train', [run.path_for('features', CONSTS.FEATURE_FILE), run.path_for('recalls', CONSTS.RECALL_FILE)],
                    [out_dir / CONSTS.LABELED_FILE, out_dir / CONSTS.MODEL_FILE])
    return succeed('Ensemble trained', {'horizon': run.horizon, 'members': len(ensemble.members),
                                        'train_examples': len(split.train), 'test_examples': len(split.test),
                                        'train_positives': int(split.train['label'].sum()),
                                        'test_positives': int(split.test['label'].sum()),
                                        'positive_rate': positive_rate(labeled)})
