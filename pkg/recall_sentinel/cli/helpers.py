import copy
import hashlib
import json
import logging
from decimal import Decimal
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

import numpy as np
import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.cli_models.generic_models import ArtifactDigest, CommandResult, ManifestEntry
from recall_sentinel.cli.cli_models.run_models import RunConfig
from recall_sentinel.cli.config import load_run_config
from recall_sentinel.cli.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def round_digit(x, decimal: int = 0):
    return x if (isinstance(x, (str, bool, int)) or (x is None)) \
        else round(float(x), decimal) if isinstance(x, Decimal) \
        else int(x) if isinstance(x, np.integer) \
        else None if (np.isnan(x) or np.isinf(x)) \
        else round(float(x), decimal)


def round_nested_dict_list(x, decimal: int):
    """
    recursively iter through dict and round
    :param x: dict or list
    :param decimal:
    :return: rounded copy, nan/inf replaced by None
    """

    def round_inner(x, result: Union[dict, list]):
        if isinstance(x, dict):
            for k, v in x.items():
                if isinstance(v, (dict, list, tuple)):
                    result[k] = list(v) if isinstance(v, tuple) else result[k]
                    round_inner(v, result[k])
                else:
                    result[k] = round_digit(v, decimal)
        elif isinstance(x, (list, tuple)):
            for idx, item in enumerate(x):
                if isinstance(item, (dict, list, tuple)):
                    result[idx] = list(item) if isinstance(item, tuple) else result[idx]
                    round_inner(item, result[idx])
                else:
                    result[idx] = round_digit(item, decimal)

    result = copy.deepcopy(x)
    if isinstance(result, tuple):
        result = list(result)
    round_inner(x, result)
    return result


def dump_json(payload, path: Path, decimal: Optional[int] = CONSTS.ANALYTICS_DECIMALS):
    """Deterministic JSON: sorted keys, no nan/inf, optional rounding."""
    if decimal is not None:
        payload = round_nested_dict_list(payload, decimal)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + '\n', encoding='utf-8')


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 20), b''):
            digest.update(block)
    return digest.hexdigest()


def resolve_config(config_path: Optional[Path], out: Optional[Path], **overrides) -> RunConfig:
    """--config if given, else run_config.json inside --out when present; flags win either way."""
    out_dir = Path(out) if out is not None else None
    if config_path is None and out_dir is not None and (out_dir / CONSTS.RUN_CONFIG_FILE).exists():
        config_path = out_dir / CONSTS.RUN_CONFIG_FILE
        logger.info(f"Using run configuration {config_path}")
    return load_run_config(config_path, out=out_dir, **overrides)


def split_day(stored: Optional[int], override: Optional[int], fallback: int) -> int:
    """First test day for a trained model: the cutoff it was fitted with wins, a conflicting flag is an error."""
    if stored is None:
        return override if override is not None else fallback
    if override is not None and override != stored:
        raise ConfigurationError(f"--train-end-day {override} disagrees with the model's training cutoff {stored}")
    return stored


def record_manifest(config: RunConfig, command: str, inputs: Iterable[Path], outputs: Iterable[Path]):
    """Add this command's entry to manifest.json in the output directory."""
    out_dir = Path(config.out)
    path = out_dir / CONSTS.MANIFEST_FILE
    manifest: Dict[str, dict] = {}
    if path.exists():
        try:
            manifest = json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError:
            logger.warning(f"Replacing unreadable manifest {path}")
    entry = ManifestEntry(command=command, config_hash=config.config_hash(), seed=config.seed,
                          inputs=[ArtifactDigest(path=_relative(p, out_dir), sha256=sha256_file(p))
                                  for p in inputs if Path(p).exists()],
                          outputs=sorted(_relative(p, out_dir) for p in outputs))
    manifest[command] = entry.dict()
    manifest['artifact_version'] = CONSTS.ARTIFACT_VERSION
    dump_json(manifest, path, decimal=None)


def _relative(path: Path, root: Path) -> str:
    try:
        return Path(path).resolve().relative_to(root.resolve()).as_posix()
    except ValueError:
        return Path(path).as_posix()


def emit(result: CommandResult):
    typer.echo(result.json(sort_keys=True))
    return result


def succeed(message: str, content=None) -> CommandResult:
    return emit(CommandResult(status_code=CONSTS.EXIT_OK.CODE, message=message,
                              content=round_nested_dict_list(content, 6) if content is not None else None))
