import logging
from pathlib import Path
from typing import Optional

import pandas as pd
import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import ConfigOption, LiftFractionOption, OutOption, PruneOption, \
    TrainEndDayOption, overrides
from recall_sentinel.cli.data.artifacts import load_labeled, load_model, load_recalls, write_csv
from recall_sentinel.cli.exceptions import command_error_handler
from recall_sentinel.cli.helpers import dump_json, record_manifest, resolve_config, split_day, succeed
from recall_sentinel.models.Evaluation import build_report
from recall_sentinel.models.Ingest import recalls_per_state
from recall_sentinel.models.Labeling import split_by_time

logger = logging.getLogger(__name__)


@command_error_handler
def evaluate(model: Optional[Path] = typer.Option(None, '--model', help='Trained model JSON.'),
             labeled: Optional[Path] = typer.Option(None, '--labeled', help='Labeled dataset CSV written by train.'),
             config: Optional[Path] = ConfigOption,
             lift_fraction: Optional[float] = LiftFractionOption,
             prune: Optional[int] = PruneOption,
             train_end_day: Optional[int] = TrainEndDayOption,
             out: Path = OutOption):
    """Score the test days and write the evaluation report with its CSV series."""
    run = resolve_config(config, out, model=model, labeled=labeled,
                         **overrides(lift_fraction=lift_fraction, prune=prune, train_end_day=train_end_day))
    ensemble = load_model(run)
    split = split_by_time(load_labeled(run), split_day(ensemble.train_end_day, train_end_day, run.train_end_day))
    report, roc = build_report(split.test, ensemble, prune_m=run.prune_m, fraction=run.lift_fraction,
                               train=split.train, m_grid=run.prune_grid)

    out_dir = Path(run.out)
    inputs = [run.path_for('model', CONSTS.MODEL_FILE), run.path_for('labeled', CONSTS.LABELED_FILE)]
    outputs = {name: out_dir / name for name in (CONSTS.REPORT_FILE, CONSTS.ROC_FILE, CONSTS.LIFT_CURVE_FILE,
                                                 CONSTS.LIFT_VS_M_FILE)}
    dump_json(report.dict(), outputs[CONSTS.REPORT_FILE])
    write_csv(pd.DataFrame({'fpr': roc.fpr, 'tpr': roc.tpr, 'threshold': roc.thresholds}), outputs[CONSTS.ROC_FILE])
    write_csv(pd.DataFrame(report.lift_curve, columns=['fraction', 'lift']), outputs[CONSTS.LIFT_CURVE_FILE])
    write_csv(pd.DataFrame(report.prune_sweep.points, columns=['m', 'lift']), outputs[CONSTS.LIFT_VS_M_FILE])

    recall_path = run.path_for('recalls', CONSTS.RECALL_FILE)
    if recall_path.is_file():
        recall_records, _ = load_recalls(run)
        outputs[CONSTS.STATE_RECALLS_FILE] = out_dir / CONSTS.STATE_RECALLS_FILE
        write_csv(recalls_per_state(recall_records, run.states), outputs[CONSTS.STATE_RECALLS_FILE])
        inputs.append(recall_path)

    record_manifest(run, 'evaluate', inputs, outputs.values())
    return succeed('Evaluation report written', {'auc': report.auc, 'lift': report.lift.lift,
                                                 'fraction': run.lift_fraction, 'n_test': report.n_test,
                                                 'positives_test': report.positives_test})
