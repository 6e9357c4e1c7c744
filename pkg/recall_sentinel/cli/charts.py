import logging
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from recall_sentinel.cli import CONSTS  # noqa: E402

logger = logging.getLogger(__name__)

# fixed salt and no date keep the SVG bytes stable between runs
plt.rcParams['svg.hashsalt'] = 'recall-sentinel'
plt.rcParams['svg.fonttype'] = 'none'


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)


def roc_chart(roc: pd.DataFrame, path: Path, auc: Optional[float] = None):
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.step(roc['fpr'], roc['tpr'], where='post', label=f'AUC {auc:.3f}' if auc is not None else 'ROC')
    ax.plot([0, 1], [0, 1], linestyle='--', color='grey', linewidth=0.8)
    ax.set_xlabel('False positive rate')
    ax.set_ylabel('True positive rate')
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(loc='lower right')
    _save(fig, path)


def lift_curve_chart(curve: pd.DataFrame, path: Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve['fraction'], curve['lift'])
    ax.axhline(1.0, linestyle='--', color='grey', linewidth=0.8)
    ax.set_xlabel('Fraction of examples ranked')
    ax.set_ylabel('Lift')
    _save(fig, path)


def lift_vs_horizon_chart(sweep: pd.DataFrame, path: Path):
    sweep = sweep.dropna(subset=['lift'])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sweep['horizon'], sweep['lift'], marker='o')
    ax.set_xlabel('Horizon (days)')
    ax.set_ylabel('Lift')
    _save(fig, path)


def lift_vs_prune_chart(pruning: pd.DataFrame, path: Path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(pruning['m'], pruning['lift'], where='post')
    ax.set_xlabel('Members kept (largest clusters first)')
    ax.set_ylabel('Lift')
    _save(fig, path)


CHARTS = {
    CONSTS.ROC_FILE: ('roc.svg', roc_chart),
    CONSTS.LIFT_CURVE_FILE: ('lift_curve.svg', lift_curve_chart),
    CONSTS.LIFT_VS_N_FILE: ('lift_vs_n.svg', lift_vs_horizon_chart),
    CONSTS.LIFT_VS_M_FILE: ('lift_vs_m.svg', lift_vs_prune_chart),
}
