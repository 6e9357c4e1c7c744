import json
import logging
from pathlib import Path

import pandas as pd

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.charts import CHARTS, roc_chart
from recall_sentinel.cli.commands.options import OutOption
from recall_sentinel.cli.exceptions import MissingArtifactError, command_error_handler
from recall_sentinel.cli.helpers import succeed

logger = logging.getLogger(__name__)


@command_error_handler
def report(out: Path = OutOption):
    """Render SVG charts from whichever CSV series exist in the output directory."""
    out = Path(out)
    auc = None
    if (out / CONSTS.REPORT_FILE).is_file():
        auc = json.loads((out / CONSTS.REPORT_FILE).read_text(encoding='utf-8')).get('auc')

    written = []
    for series_name, (chart_name, draw) in CHARTS.items():
        series_path = out / series_name
        if not series_path.is_file():
            logger.debug(f"{series_path} missing; chart skipped")
            continue
        frame = pd.read_csv(series_path)
        if draw is roc_chart:
            draw(frame, out / chart_name, auc=auc)
        else:
            draw(frame, out / chart_name)
        written.append(chart_name)
    if not written:
        raise MissingArtifactError('CSV series', out / CONSTS.ROC_FILE)
    return succeed('Charts written', {'charts': written})
