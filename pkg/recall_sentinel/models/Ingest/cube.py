import logging
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InputFormatError
from recall_sentinel.models.utils import canonical_sort

logger = logging.getLogger(__name__)

CellKey = Tuple[str, str, int]


class CountCube:
    """
    Sparse per (drug, state, day) query counts with two channels: every query
    naming the drug, and the subset that also names a symptom. Absent cells are zero.
    `rx_otc` doubles as the drug universe, `states` as the state universe.
    """

    def __init__(self, cells: pd.DataFrame, n_days: int = CONSTS.STUDY_DAYS,
                 rx_otc: Optional[Mapping[str, str]] = None, states: Optional[List[str]] = None):
        missing = set(CONSTS.CUBE_COLUMNS) - set(cells.columns)
        if missing:
            raise InputFormatError(f"Count cube is missing columns {sorted(missing)}")
        cells = cells[CONSTS.CUBE_COLUMNS].copy()
        cells['drug'] = cells['drug'].astype(str)
        cells['state'] = cells['state'].astype(str)
        try:
            for col in ['day', 'total_count', 'symptom_count']:
                cells[col] = cells[col].astype(np.int64)
        except (TypeError, ValueError) as e:
            raise InputFormatError(f"Count cube column {col} is not integral: {e}")
        self._validate(cells, n_days)
        cells = cells[cells['total_count'] > 0]

        self.n_days = n_days
        self.cells = canonical_sort(cells)
        rx_otc = dict(rx_otc or {})
        for drug in self.cells['drug'].unique():
            rx_otc.setdefault(drug, CONSTS.UNCLASSIFIED)
        self.rx_otc: Dict[str, str] = dict(sorted(rx_otc.items()))
        self.states = sorted(set(states) if states is not None else set(self.cells['state']))

    @staticmethod
    def _validate(cells: pd.DataFrame, n_days: int):
        if (cells['symptom_count'] < 0).any() or (cells['total_count'] < 0).any():
            raise InputFormatError('Count cube holds negative counts')
        bad = cells['symptom_count'] > cells['total_count']
        if bad.any():
            first = cells[bad].iloc[0]
            raise InputFormatError(f"symptom_count exceeds total_count at ({first['drug']}, {first['state']}, {first['day']})")
        out_of_range = (cells['day'] < 0) | (cells['day'] >= n_days)
        if out_of_range.any():
            raise InputFormatError(f"Count cube day outside [0, {n_days})", int(cells.loc[out_of_range, 'day'].iloc[0]))
        if cells.duplicated(CONSTS.KEY_COLUMNS).any():
            raise InputFormatError('Count cube holds duplicate cells')

    @classmethod
    def from_counts(cls, counts: Mapping[CellKey, Tuple[int, int]], n_days=CONSTS.STUDY_DAYS, rx_otc=None, states=None):
        rows = [(d, s, day, t, sym) for (d, s, day), (t, sym) in counts.items()]
        cells = pd.DataFrame(rows, columns=CONSTS.CUBE_COLUMNS)
        return cls(cells, n_days=n_days, rx_otc=rx_otc, states=states)

    @classmethod
    def empty(cls, n_days=CONSTS.STUDY_DAYS, rx_otc=None, states=None):
        return cls(pd.DataFrame(columns=CONSTS.CUBE_COLUMNS), n_days=n_days, rx_otc=rx_otc, states=states)

    @property
    def drugs(self) -> List[str]:
        return list(self.rx_otc)

    def __len__(self):
        return len(self.cells)

    def cell(self, drug: str, state: str, day: int) -> Tuple[int, int]:
        hit = self.cells[(self.cells['drug'] == drug) & (self.cells['state'] == state) & (self.cells['day'] == day)]
        if hit.empty:
            return 0, 0
        return int(hit['total_count'].iloc[0]), int(hit['symptom_count'].iloc[0])

    def series(self, drug: str, state: str) -> Tuple[np.ndarray, np.ndarray]:
        """Dense daily (total, symptom) series of length n_days."""
        part = self.cells[(self.cells['drug'] == drug) & (self.cells['state'] == state)]
        return self._densify(part)

    def _densify(self, part: pd.DataFrame) -> Tuple[np.ndarray, np.ndarray]:
        total = np.zeros(self.n_days)
        symptom = np.zeros(self.n_days)
        days = part['day'].to_numpy()
        total[days] = part['total_count'].to_numpy()
        symptom[days] = part['symptom_count'].to_numpy()
        return total, symptom

    def iter_series(self) -> Iterator[Tuple[str, str, np.ndarray, np.ndarray]]:
        """Dense series for every drug x state pair, unseen pairs as zeros, in canonical order."""
        groups = {key: part for key, part in self.cells.groupby(['drug', 'state'], sort=True)}
        empty = self.cells.iloc[0:0]
        for drug in self.drugs:
            for state in self.states:
                total, symptom = self._densify(groups.get((drug, state), empty))
                yield drug, state, total, symptom

    def drug_totals(self) -> pd.Series:
        totals = self.cells.groupby('drug')['total_count'].sum()
        return totals.reindex(self.drugs, fill_value=0).astype(np.int64)

    def restrict_drugs(self, keep) -> 'CountCube':
        keep = set(keep)
        cells = self.cells[self.cells['drug'].isin(keep)]
        rx_otc = {d: v for d, v in self.rx_otc.items() if d in keep}
        return CountCube(cells, n_days=self.n_days, rx_otc=rx_otc, states=self.states)

    def __add__(self, other: 'CountCube') -> 'CountCube':
        if self.n_days != other.n_days:
            raise ValueError('Cannot add cubes over different study lengths', (self.n_days, other.n_days))
        both = pd.concat([self.cells, other.cells], ignore_index=True)
        summed = both.groupby(CONSTS.KEY_COLUMNS, as_index=False)[['total_count', 'symptom_count']].sum()
        return CountCube(summed, n_days=self.n_days, rx_otc={**other.rx_otc, **self.rx_otc},
                         states=sorted(set(self.states) | set(other.states)))

    def __eq__(self, other):
        if not isinstance(other, CountCube):
            return NotImplemented
        return self.n_days == other.n_days and self.cells.equals(other.cells)

    def to_csv(self, path_or_buf):
        self.cells.to_csv(path_or_buf, index=False)

    @classmethod
    def from_csv(cls, path_or_buf, n_days=CONSTS.STUDY_DAYS, rx_otc=None, states=None) -> 'CountCube':
        try:
            cells = pd.read_csv(path_or_buf, dtype={'drug': str, 'state': str})
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise InputFormatError(f"Unreadable count cube: {e}")
        if rx_otc is not None:
            present = set(cells['drug']) if 'drug' in cells else set()
            rx_otc = {d: v for d, v in rx_otc.items() if d in present}
        cube = cls(cells, n_days=n_days, rx_otc=rx_otc, states=states)
        logger.info(f"Loaded count cube with {len(cube)} cells over {len(cube.drugs)} drugs")
        return cube
