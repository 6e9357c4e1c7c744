from recall_sentinel.models.Ensemble.kmeans import KMeansResult, kmeans
from recall_sentinel.models.Ensemble.linear import LinearMember, fit_linear, interaction_map, solve_ridge, term_attributes
from recall_sentinel.models.Ensemble.ensemble import Ensemble, StandardizationStats, predict, train_ensemble
from recall_sentinel.models.Ensemble.importance import AttributeImportance, ImportanceReport, attribute_importance

__all__ = ['KMeansResult', 'kmeans', 'LinearMember', 'fit_linear', 'interaction_map', 'solve_ridge', 'term_attributes',
           'Ensemble', 'StandardizationStats', 'predict', 'train_ensemble', 'AttributeImportance', 'ImportanceReport',
           'attribute_importance']
