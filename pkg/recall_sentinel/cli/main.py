import logging

import click
import typer

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.convert import convert
from recall_sentinel.cli.commands.evaluate import evaluate
from recall_sentinel.cli.commands.featurize import featurize
from recall_sentinel.cli.commands.ingest import ingest
from recall_sentinel.cli.commands.report import report
from recall_sentinel.cli.commands.score import score
from recall_sentinel.cli.commands.sweep import sweep
from recall_sentinel.cli.commands.synth import synth
from recall_sentinel.cli.commands.train import train
from recall_sentinel.cli.config import get_settings

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help='Predict drug recalls from symptom-bearing search query volume.')

logger = logging.getLogger(__name__)


def configure_logging(level: str = 'INFO', log_file: str = None):
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=level.upper(),
        format='[%(asctime)s] {%(pathname)s:%(lineno)d} %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d, %H:%M:%S',
        handlers=handlers,
        force=True
    )


@app.callback()
def main(verbose: bool = typer.Option(False, '--verbose', '-v', help='Log at DEBUG level.')):
    settings = get_settings()
    configure_logging('DEBUG' if verbose else settings.log_level, settings.log_file)


app.command('synth')(synth)
app.command('ingest')(ingest)
app.command('featurize')(featurize)
app.command('train')(train)
app.command('score')(score)
app.command('evaluate')(evaluate)
app.command('sweep')(sweep)
app.command('report')(report)
app.command('convert')(convert)


def run_command(argv=None) -> int:
    """Run one subcommand and return its exit status instead of exiting."""
    try:
        result = app(args=argv, prog_name='recall_sentinel', standalone_mode=False)
    except click.exceptions.Abort:
        return CONSTS.EXIT_FAILURE.CODE
    except click.exceptions.ClickException as e:
        e.show()
        return e.exit_code
    # click hands back the exit code of typer.Exit, otherwise the command's return value
    return result if isinstance(result, int) else CONSTS.EXIT_OK.CODE
