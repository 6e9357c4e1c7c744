from recall_sentinel.models.Evaluation.metrics import (LiftResult, RocResult, lift_at, lift_curve, pairwise_auc,
                                                       rank_order, roc_auc, top_count)
from recall_sentinel.models.Evaluation.stats import RankRegressionResult, rank_regression, spearman
from recall_sentinel.models.Evaluation.analysis import (ClusterUsage, PruneSweepResult, StrataReport, cluster_usage,
                                                        prune_sweep, strata_analysis)
from recall_sentinel.models.Evaluation.pipeline import (EvalReport, HorizonPoint, HorizonRun, HorizonSweepResult,
                                                        PipelineParams, attribute_matrix, build_report, horizon_sweep,
                                                        run_horizon)

__all__ = ['LiftResult', 'RocResult', 'lift_at', 'lift_curve', 'pairwise_auc', 'rank_order', 'roc_auc', 'top_count',
           'RankRegressionResult', 'rank_regression', 'spearman', 'ClusterUsage', 'PruneSweepResult', 'StrataReport',
           'cluster_usage', 'prune_sweep', 'strata_analysis', 'EvalReport', 'HorizonPoint', 'HorizonRun',
           'HorizonSweepResult', 'PipelineParams', 'attribute_matrix', 'build_report', 'horizon_sweep', 'run_horizon']
