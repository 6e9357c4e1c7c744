import datetime
import hashlib
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, root_validator, validator

from recall_sentinel.cli import CONSTS


class RunConfig(BaseModel):
    # paths
    drugs: Optional[Path] = None
    symptoms: Optional[Path] = None
    queries: Optional[Path] = None
    cube: Optional[Path] = None
    recalls: Optional[Path] = None
    features: Optional[Path] = None
    labeled: Optional[Path] = None
    model: Optional[Path] = None
    out: Path = Path('.')

    # study window
    study_start: datetime.date = CONSTS.STUDY_START
    n_days: int = CONSTS.STUDY_DAYS
    states: List[str] = CONSTS.US_STATES

    # pipeline constants
    horizon: int = 1
    max_horizon: int = CONSTS.MAX_HORIZON
    train_end_day: int = CONSTS.TRAIN_END_DAY
    k: int = CONSTS.DEFAULT_K
    lam: float = Field(CONSTS.DEFAULT_LAMBDA, alias='lambda')
    lift_fraction: float = CONSTS.DEFAULT_LIFT_FRACTION
    prune_m: Optional[int] = None
    seed: int = CONSTS.DEFAULT_SEED
    min_queries: int = CONSTS.DEFAULT_MIN_QUERIES

    # sweeps
    horizon_grid: List[int] = [1, 3, 5, 10, 20, 40]
    prune_grid: Optional[List[int]] = None

    class Config:
        allow_population_by_field_name = True
        extra = 'forbid'

    @validator('states', each_item=True)
    def known_state(cls, v):
        v = v.strip().upper()
        if v not in CONSTS.US_STATES:
            raise ValueError(f"unknown state code {v!r}")
        return v

    @validator('k')
    def positive_k(cls, v):
        if v < 1:
            raise ValueError('k must be at least 1')
        return v

    @validator('lam')
    def non_negative_lambda(cls, v):
        if v < 0:
            raise ValueError('lambda must be non-negative')
        return v

    @validator('lift_fraction')
    def fraction_in_range(cls, v):
        if not 0 < v <= 1:
            raise ValueError('lift fraction must be in (0, 1]')
        return v

    @validator('min_queries')
    def non_negative_min_queries(cls, v):
        if v < 0:
            raise ValueError('min_queries must be non-negative')
        return v

    @validator('prune_m')
    def positive_prune(cls, v):
        if v is not None and v < 1:
            raise ValueError('prune must be at least 1')
        return v

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values):
        n_days, max_horizon = values['n_days'], values['max_horizon']
        if not 0 < values['train_end_day'] < n_days:
            raise ValueError(f"train_end_day must be in (0, {n_days})")
        for n in [values['horizon']] + list(values['horizon_grid']):
            if not 1 <= n <= max_horizon:
                raise ValueError(f"horizon {n} outside [1, {max_horizon}]")
        return values

    def path_for(self, field: str, default_name: str) -> Path:
        explicit = getattr(self, field)
        return Path(explicit) if explicit is not None else Path(self.out) / default_name

    def config_hash(self) -> str:
        """Hash over every setting except output location."""
        payload = self.copy(update={'out': Path('.')}).json(sort_keys=True, by_alias=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()
