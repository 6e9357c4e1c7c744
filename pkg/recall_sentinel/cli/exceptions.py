import logging
import traceback
from functools import wraps

import click
import typer
from pydantic import ValidationError

from recall_sentinel.cli import CONSTS

logger = logging.getLogger(__name__)


class PipelineException(Exception):
    pass


class InputFormatError(PipelineException, ValueError):
    pass


class LexiconFormatError(InputFormatError):
    def __init__(self, source, row_errors):
        self.source = source
        self.row_errors = list(row_errors)
        detail = '; '.join(f"row {err.line}: {err.reason}" for err in self.row_errors[:10])
        more = f" (+{len(self.row_errors) - 10} more)" if len(self.row_errors) > 10 else ''
        super().__init__(f"Malformed lexicon {source}: {detail}{more}")


class MissingArtifactError(PipelineException, FileNotFoundError):
    def __init__(self, artifact, path):
        self.artifact = artifact
        self.path = path
        super().__init__(f"Missing {artifact}: {path} does not exist")


class InsufficientDataError(PipelineException, ValueError):
    pass


class WarmupError(InsufficientDataError):
    pass


class ConfigurationError(PipelineException, ValueError):
    pass


def command_error_handler(func):
    """Turn pipeline failures into a one-line diagnostic and exit status 1."""
    @wraps(func)
    def inner(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (typer.Exit, typer.Abort, click.exceptions.ClickException):
            raise
        except PipelineException as e:
            logger.error(f"{func.__name__} failed: {e}")
            typer.echo(f"error: {e}", err=True)
            raise typer.Exit(code=CONSTS.EXIT_FAILURE.CODE)
        except ValidationError as e:
            logger.error(f"{func.__name__} received an invalid configuration: {e}")
            typer.echo(f"error: invalid configuration: {e}", err=True)
            raise typer.Exit(code=CONSTS.EXIT_FAILURE.CODE)
        except Exception as e:
            logger.exception(f"An error has occurred in {func.__name__}: {repr(e)}. Detail: {traceback.format_exc()}")
            typer.echo(f"error: {e}", err=True)
            raise typer.Exit(code=CONSTS.EXIT_FAILURE.CODE)
    return inner
