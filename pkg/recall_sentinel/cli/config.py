import json
import logging
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseSettings

from recall_sentinel.cli.cli_models.run_models import RunConfig
from recall_sentinel.cli.exceptions import ConfigurationError, MissingArtifactError

load_dotenv()

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    threads: int = 0
    log_level: str = 'INFO'
    log_file: Optional[str] = None

    class Config:
        env_prefix = 'RECALL_SENTINEL_'


def get_settings() -> Settings:
    return Settings()


def load_run_config(config_path: Optional[Path] = None, **overrides) -> RunConfig:
    """JSON config file first, then every flag that was actually given."""
    values = {}
    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.exists():
            raise MissingArtifactError('config file', config_path)
        try:
            values = json.loads(config_path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{config_path}: line {e.lineno}: {e.msg}")
        if not isinstance(values, dict):
            raise ConfigurationError(f"{config_path}: top level must be a JSON object")
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**values)
    logger.debug(f"Resolved run config: {config.json(sort_keys=True)}")
    return config
