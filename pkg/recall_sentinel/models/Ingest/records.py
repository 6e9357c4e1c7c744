import datetime
from typing import List, Optional

from pydantic import BaseModel, validator

from recall_sentinel.cli import CONSTS


def strict_date(v):
    if isinstance(v, datetime.date):
        return v
    if not isinstance(v, str):
        raise ValueError(f"date must be an ISO-8601 string, got {type(v).__name__}")
    return datetime.date.fromisoformat(v.strip())


class StudyWindow(BaseModel):
    start: datetime.date = CONSTS.STUDY_START
    n_days: int = CONSTS.STUDY_DAYS
    states: List[str] = CONSTS.US_STATES

    def day_of(self, date: datetime.date) -> int:
        return (date - self.start).days

    def date_of(self, day: int) -> datetime.date:
        return self.start + datetime.timedelta(days=day)

    def contains(self, date: datetime.date) -> bool:
        return 0 <= self.day_of(date) < self.n_days


class QueryRecord(BaseModel):
    user_id: str
    date: datetime.date
    state: str
    text: str
    day: int = -1

    _date = validator('date', pre=True, allow_reuse=True)(strict_date)

    @validator('user_id', 'text', pre=True)
    def must_be_string(cls, v):
        if not isinstance(v, str):
            raise ValueError(f"expected a string, got {type(v).__name__}")
        return v

    @validator('state')
    def two_letter_state(cls, v):
        v = v.strip().upper()
        if len(v) != 2 or not v.isalpha():
            raise ValueError(f"state must be a 2-letter code, got {v!r}")
        return v


class RecallRecord(BaseModel):
    drug: str
    initiation_date: datetime.date
    # offset from the study start
    day: int
    states: List[str]
    classification: str
    rx_otc: Optional[str] = None
    nationwide: bool = False

    _date = validator('initiation_date', pre=True, allow_reuse=True)(strict_date)

    @validator('classification')
    def known_class(cls, v):
        v = v.strip().upper()
        if v not in CONSTS.RECALL_CLASSES:
            raise ValueError(f"classification must be one of {CONSTS.RECALL_CLASSES}, got {v!r}")
        return v

    @validator('rx_otc')
    def known_rx_otc(cls, v):
        if v is None:
            return v
        v = v.strip().upper()
        if v not in CONSTS.RX_OTC_VALUES:
            raise ValueError(f"rx_otc must be one of {CONSTS.RX_OTC_VALUES}, got {v!r}")
        return v

    @validator('states')
    def non_empty_states(cls, v):
        if not v:
            raise ValueError('a recall must affect at least one state')
        return sorted(set(v))

    def to_row(self) -> dict:
        row = {'drug': self.drug,
               'initiation_date': self.initiation_date.isoformat(),
               'distribution': CONSTS.NATIONWIDE if self.nationwide else list(self.states),
               'classification': self.classification}
        if self.rx_otc is not None:
            row['rx_otc'] = self.rx_otc
        return row
