from recall_sentinel.models.Features.features import (FEATURE_COLUMNS, FeatureRow, apply_censoring, before_first_recall,
                                                      extract_all, extract_features, first_recall_days, read_features,
                                                      series_attributes, spike_ratio, window_slope, write_features)

__all__ = ['FEATURE_COLUMNS', 'FeatureRow', 'apply_censoring', 'before_first_recall', 'extract_all', 'extract_features',
           'first_recall_days', 'read_features', 'series_attributes', 'spike_ratio', 'window_slope', 'write_features']
