"""Flags shared by the subcommands."""
from pathlib import Path

import typer

ConfigOption = typer.Option(None, '--config', help='Run configuration JSON; flags override it.')
OutOption = typer.Option(Path('.'), '--out', help='Directory holding the conventional artifact files.')
HorizonOption = typer.Option(None, '--horizon', help='Prediction horizon N in days.')
KOption = typer.Option(None, '--k', help='Number of negative-class clusters.')
LambdaOption = typer.Option(None, '--lambda', help='Ridge penalty.')
SeedOption = typer.Option(None, '--seed', help='Random seed.')
TrainEndDayOption = typer.Option(None, '--train-end-day', help='First test day; earlier days train.')
LiftFractionOption = typer.Option(None, '--lift-fraction', help='Top fraction T for lift.')
PruneOption = typer.Option(None, '--prune',
                           help='Score with only the m largest-cluster members; the saved model keeps all of them.')
MinQueriesOption = typer.Option(None, '--min-queries', help='Drop drugs with fewer queries over the study.')


def overrides(horizon=None, k=None, lam=None, seed=None, train_end_day=None, lift_fraction=None, prune=None,
              min_queries=None) -> dict:
    return {'horizon': horizon, 'k': k, 'lambda': lam, 'seed': seed, 'train_end_day': train_end_day,
            'lift_fraction': lift_fraction, 'prune_m': prune, 'min_queries': min_queries}
