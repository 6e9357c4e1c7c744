import logging
from pathlib import Path

import typer
import ujson

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.commands.options import OutOption
from recall_sentinel.cli.data.artifacts import require, write_jsonl, write_row_errors
from recall_sentinel.cli.exceptions import InputFormatError, command_error_handler
from recall_sentinel.cli.helpers import succeed
from recall_sentinel.models.Ingest import convert_openfda

logger = logging.getLogger(__name__)


@command_error_handler
def convert(source: Path = typer.Argument(..., help='openFDA drug enforcement JSON (array or API response).'),
            out: Path = OutOption):
    """Convert openFDA enforcement reports into the native recall JSONL."""
    source = require(source, 'openFDA file')
    try:
        payload = ujson.loads(source.read_text(encoding='utf-8'))
    except (ValueError, UnicodeDecodeError) as e:
        raise InputFormatError(f"{source}: {e}")
    rows, errors = convert_openfda(payload)

    out = Path(out)
    write_jsonl(rows, out / CONSTS.RECALL_FILE)
    write_row_errors(((str(source), e) for e in errors), out / CONSTS.CONVERT_ERRORS_FILE)
    return succeed('Recall file written', {'recalls': len(rows), 'unmapped': len(errors)})
