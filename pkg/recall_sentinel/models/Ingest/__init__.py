from recall_sentinel.models.Ingest.records import QueryRecord, RecallRecord, StudyWindow
from recall_sentinel.models.Ingest.cube import CountCube
from recall_sentinel.models.Ingest.ingest import (build_count_cube, filter_drugs, parse_query_log,
                                                  parse_recall_file, recalls_per_state)
from recall_sentinel.models.Ingest.openfda import convert_openfda

__all__ = ['QueryRecord', 'RecallRecord', 'StudyWindow', 'CountCube', 'build_count_cube', 'filter_drugs',
           'parse_query_log', 'parse_recall_file', 'recalls_per_state', 'convert_openfda']
