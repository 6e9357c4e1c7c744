from recall_sentinel.models.Labeling.labeling import (LABELED_COLUMNS, DatasetSplit, label_examples, positive_rate,
                                                      post_recall_exclusion, prepare_examples, split_by_time)

__all__ = ['LABELED_COLUMNS', 'DatasetSplit', 'label_examples', 'positive_rate', 'post_recall_exclusion',
           'prepare_examples', 'split_by_time']
