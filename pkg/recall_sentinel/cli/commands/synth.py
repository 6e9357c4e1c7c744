import json
import logging
from pathlib import Path
from typing import Optional

import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import OutOption
from recall_sentinel.cli.data.artifacts import require, write_jsonl
from recall_sentinel.cli.exceptions import ConfigurationError, command_error_handler
from recall_sentinel.cli.helpers import dump_json, record_manifest, succeed
from recall_sentinel.cli.config import load_run_config
from recall_sentinel.models.Lexicon import write_drug_lexicon, write_symptom_lexicon
from recall_sentinel.models.Synth import SynthConfig, expand_to_query_log, generate

logger = logging.getLogger(__name__)

# desk-scale cluster count written into the run configuration next to synthetic data
DESK_K = 10


@command_error_handler
def synth(synth_config: Optional[Path] = typer.Option(None, '--synth-config', help='SynthConfig JSON; flags override it.'),
          seed: Optional[int] = typer.Option(None, '--seed'),
          gamma: Optional[float] = typer.Option(None, '--gamma', help='Rate multiplier inside injection windows.'),
          window: Optional[int] = typer.Option(None, '--window', help='Injection window length L in days.'),
          ramp: Optional[str] = typer.Option(None, '--ramp', help='flat or linear.'),
          symptom_boost: Optional[float] = typer.Option(None, '--symptom-boost'),
          n_drugs: Optional[int] = typer.Option(None, '--n-drugs'),
          n_states: Optional[int] = typer.Option(None, '--n-states'),
          n_days: Optional[int] = typer.Option(None, '--n-days'),
          n_recalls: Optional[int] = typer.Option(None, '--n-recalls'),
          mode: Optional[str] = typer.Option(None, '--mode', help='log writes a query log, cube writes counts.'),
          out: Path = OutOption):
    """Generate a seeded synthetic scenario: lexicons, query log or count cube, recalls and ground truth."""
    values = {}
    if synth_config is not None:
        try:
            values = json.loads(require(synth_config, 'synth config').read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{synth_config}: line {e.lineno}: {e.msg}")
    flags = {'seed': seed, 'gamma': gamma, 'window': window, 'ramp': ramp, 'symptom_boost': symptom_boost,
             'n_drugs': n_drugs, 'n_states': n_states, 'n_days': n_days, 'n_recalls': n_recalls, 'mode': mode}
    values.update({k: v for k, v in flags.items() if v is not None})
    config = SynthConfig(**values)
    result = generate(config)

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = {name: out / name for name in (CONSTS.DRUG_LEXICON_FILE, CONSTS.SYMPTOM_LEXICON_FILE, CONSTS.RECALL_FILE,
                                             CONSTS.TRUTH_FILE, CONSTS.SYNTH_CONFIG_FILE, CONSTS.RUN_CONFIG_FILE)}
    with open(outputs[CONSTS.DRUG_LEXICON_FILE], 'w', encoding='utf-8', newline='') as f:
        write_drug_lexicon(result.lexicon, f)
    with open(outputs[CONSTS.SYMPTOM_LEXICON_FILE], 'w', encoding='utf-8') as f:
        write_symptom_lexicon(result.symptoms, f)
    write_jsonl(result.recall_rows, outputs[CONSTS.RECALL_FILE])
    dump_json(json.loads(result.truth.json()), outputs[CONSTS.TRUTH_FILE])
    dump_json(json.loads(config.json()), outputs[CONSTS.SYNTH_CONFIG_FILE], decimal=None)

    # stale artifacts of the other mode would shadow this run's data
    for stale in (CONSTS.QUERY_LOG_FILE, CONSTS.CUBE_FILE):
        (out / stale).unlink(missing_ok=True)
    if config.mode == 'log':
        outputs[CONSTS.QUERY_LOG_FILE] = out / CONSTS.QUERY_LOG_FILE
        write_jsonl(expand_to_query_log(result), outputs[CONSTS.QUERY_LOG_FILE])
    else:
        outputs[CONSTS.CUBE_FILE] = out / CONSTS.CUBE_FILE
        result.cube.to_csv(outputs[CONSTS.CUBE_FILE])

    run_values = {'study_start': config.study_start.isoformat(), 'n_days': config.n_days, 'states': config.states,
                  'k': DESK_K, 'seed': config.seed}
    if config.n_days != CONSTS.STUDY_DAYS:
        # keep the default train/test proportion on shortened or stretched studies
        run_values['train_end_day'] = max(1, round(config.n_days * CONSTS.TRAIN_END_DAY / CONSTS.STUDY_DAYS))
    dump_json(run_values, outputs[CONSTS.RUN_CONFIG_FILE], decimal=None)
    run_config = load_run_config(outputs[CONSTS.RUN_CONFIG_FILE], out=out)
    record_manifest(run_config, 'synth', [], outputs.values())
    return succeed('Synthetic scenario written', {'mode': config.mode, 'recalls': len(result.recalls),
                                                  'queries': int(result.cube.cells['total_count'].sum()),
                                                  'out': str(out)})
