import datetime
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.worker.tasks import parallel_map
from recall_sentinel.models.Ingest import CountCube, RecallRecord, StudyWindow
from recall_sentinel.models.Lexicon import DrugEntry, DrugLexicon, SymptomLexicon

logger = logging.getLogger(__name__)

SYMPTOM_PHRASES = ['headache', 'nausea', 'rash', 'muscle pain', 'dizziness', 'vomiting', 'chest pain', 'fever',
                   'stomach ache', 'blurred vision']
PLAIN_SUFFIXES = ['dosage', 'price', 'coupon', 'generic', 'interactions', 'reviews']

# independent random streams derived from the single seed
_SCHEDULE, _POPULARITY, _COUNTS, _QUERIES = 0, 1, 2, 3


class SynthConfig(BaseModel):
    n_drugs: int = 20
    n_states: int = 10
    n_days: int = CONSTS.STUDY_DAYS
    study_start: datetime.date = CONSTS.STUDY_START

    # daily rate of drug d in state s is popularity_d * state_weight_s
    popularity_median: float = 5.0
    popularity_dispersion: float = 0.5
    state_weights: Optional[List[float]] = None
    state_weight_dispersion: float = 0.3
    symptom_fraction: float = 0.1

    n_recalls: int = 40
    recall_days: Optional[List[int]] = None
    class_mix: Dict[str, float] = {'I': 0.1, 'II': 0.7, 'III': 0.2}
    rx_otc_mix: Dict[str, float] = {CONSTS.RX: 0.6, CONSTS.OTC: 0.3, CONSTS.UNCLASSIFIED: 0.1}
    nationwide_probability: float = 0.1

    window: int = 7
    gamma: float = 5.0
    ramp: str = 'flat'
    symptom_boost: float = 0.0

    mode: str = 'log'
    seed: int = CONSTS.DEFAULT_SEED

    class Config:
        extra = 'forbid'

    @validator('n_drugs', 'n_states', 'n_days', 'window')
    def positive(cls, v):
        if v < 1:
            raise ValueError('must be positive')
        return v

    @validator('popularity_median', 'popularity_dispersion', 'state_weight_dispersion', 'n_recalls', 'symptom_boost')
    def non_negative(cls, v):
        if v < 0:
            raise ValueError('must be non-negative')
        return v

    @validator('symptom_fraction', 'nationwide_probability')
    def probability(cls, v):
        if not 0 <= v <= 1:
            raise ValueError('must lie in [0, 1]')
        return v

    @validator('gamma')
    def amplitude(cls, v):
        if v < 1:
            raise ValueError('amplitude multiplier must be at least 1')
        return v

    @validator('ramp')
    def known_ramp(cls, v):
        if v not in ('flat', 'linear'):
            raise ValueError(f"ramp must be 'flat' or 'linear', got {v!r}")
        return v

    @validator('mode')
    def known_mode(cls, v):
        if v not in ('log', 'cube'):
            raise ValueError(f"mode must be 'log' or 'cube', got {v!r}")
        return v

    @validator('class_mix')
    def class_mix_valid(cls, v):
        return _check_mix(v, CONSTS.RECALL_CLASSES)

    @validator('rx_otc_mix')
    def rx_mix_valid(cls, v):
        return _check_mix(v, CONSTS.RX_OTC_VALUES)

    @root_validator(skip_on_failure=True)
    def check_schedule(cls, values):
        n_states, n_days, window = values['n_states'], values['n_days'], values['window']
        if n_states > len(CONSTS.US_STATES):
            raise ValueError(f"at most {len(CONSTS.US_STATES)} states")
        weights = values.get('state_weights')
        if weights is not None and (len(weights) != n_states or min(weights) < 0):
            raise ValueError('state_weights needs one non-negative weight per state')
        if window >= n_days:
            raise ValueError('injection window must be shorter than the study')
        first = window + CONSTS.WARMUP_DAYS
        if first >= n_days:
            raise ValueError(f"no room for recalls: earliest recall day {first} is past the study end")
        days = values.get('recall_days')
        if days is not None and any(not first <= d < n_days for d in days):
            raise ValueError(f"recall days must lie in [{first}, {n_days})")
        return values

    @property
    def first_recall_day(self) -> int:
        return self.window + CONSTS.WARMUP_DAYS

    @property
    def states(self) -> List[str]:
        return CONSTS.US_STATES[:self.n_states]

    @property
    def study_window(self) -> StudyWindow:
        return StudyWindow(start=self.study_start, n_days=self.n_days, states=self.states)


def _check_mix(mix: Dict[str, float], allowed) -> Dict[str, float]:
    mix = {k.strip().upper(): float(p) for k, p in mix.items()}
    unknown = set(mix) - set(allowed)
    if unknown:
        raise ValueError(f"unknown categories {sorted(unknown)}")
    if any(p < 0 for p in mix.values()) or sum(mix.values()) <= 0:
        raise ValueError('mix weights must be non-negative and not all zero')
    total = sum(mix.values())
    return {k: mix.get(k, 0.0) / total for k in allowed}


class InjectionWindow(BaseModel):
    drug: str
    states: List[str]
    recall_day: int
    window_start: int
    window_end: int
    gamma: float
    classification: str
    rx_otc: str
    nationwide: bool


class InjectionTruth(BaseModel):
    seed: int
    ramp: str
    symptom_boost: float
    windows: List[InjectionWindow]


class SynthResult(BaseModel):
    config: SynthConfig
    lexicon: List[DrugEntry]
    symptoms: SymptomLexicon
    cube: CountCube
    recalls: List[RecallRecord]
    truth: InjectionTruth
    popularity: List[float]
    state_weights: List[float]

    class Config:
        arbitrary_types_allowed = True

    @property
    def recall_rows(self) -> List[dict]:
        return [r.to_row() for r in self.recalls]


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream])


def apportion(mix: Dict[str, float], n: int) -> List[str]:
    """Largest-remainder split of n slots across the mix, in mix order."""
    keys = list(mix)
    exact = np.array([mix[k] * n for k in keys])
    counts = np.floor(exact).astype(int)
    for i in np.argsort(-(exact - counts), kind='stable')[:n - counts.sum()]:
        counts[i] += 1
    return [k for k, c in zip(keys, counts) for _ in range(c)]


def synthetic_lexicon(n_drugs: int, rx_otc_mix: Dict[str, float]) -> List[DrugEntry]:
    classes = apportion(rx_otc_mix, n_drugs)
    return [DrugEntry(canonical_name=f'compound{i:03d}', brand_names=[f'brand{i:03d}'], rx_otc=classes[i])
            for i in range(n_drugs)]


def ramp_profile(window: int, gamma: float, ramp: str) -> np.ndarray:
    """Rate multiplier for the window days r-L .. r-1."""
    if ramp == 'flat':
        return np.full(window, gamma)
    return 1.0 + (gamma - 1.0) * np.arange(1, window + 1) / window


def recall_schedule(config: SynthConfig, lexicon: List[DrugEntry]) -> List[InjectionWindow]:
    rng = _rng(config.seed, _SCHEDULE)
    classes, class_p = list(config.class_mix), list(config.class_mix.values())
    rx_values, rx_p = list(config.rx_otc_mix), list(config.rx_otc_mix.values())
    states = config.states
    n_recalls = len(config.recall_days) if config.recall_days is not None else config.n_recalls

    windows = []
    for i in range(n_recalls):
        classification = classes[rng.choice(len(classes), p=class_p)]
        rx_otc = rx_values[rng.choice(len(rx_values), p=rx_p)]
        pool = [e for e in lexicon if e.rx_otc == rx_otc] or lexicon
        entry = pool[rng.integers(len(pool))]
        day = config.recall_days[i] if config.recall_days is not None \
            else int(rng.integers(config.first_recall_day, config.n_days))
        nationwide = bool(rng.random() < config.nationwide_probability)
        if nationwide:
            affected = list(states)
        else:
            size = int(rng.integers(1, min(3, len(states)) + 1))
            affected = sorted(states[j] for j in rng.choice(len(states), size=size, replace=False))
        windows.append(InjectionWindow(drug=entry.canonical_name, states=affected, recall_day=day,
                                       window_start=day - config.window, window_end=day - 1, gamma=config.gamma,
                                       classification=classification, rx_otc=entry.rx_otc,
                                       nationwide=nationwide or len(affected) == len(states)))
    windows.sort(key=lambda w: (w.recall_day, w.drug, w.states))
    return windows


def _stream_counts(config: SynthConfig, drug_idx: int, state_idx: int, rate: float,
                   multiplier: np.ndarray, boost: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    rng = _rng(config.seed, _COUNTS, drug_idx, state_idx)
    total = rng.poisson(rate * multiplier)
    fraction = np.minimum(1.0, config.symptom_fraction + boost)
    symptom = rng.binomial(total, fraction)
    return total, symptom


def generate(config: SynthConfig, threads: Optional[int] = None) -> SynthResult:
    """Poisson baselines per (drug, state) with multiplicative pre-recall injections."""
    lexicon = synthetic_lexicon(config.n_drugs, config.rx_otc_mix)
    states = config.states
    pop_rng = _rng(config.seed, _POPULARITY)
    popularity = config.popularity_median * np.exp(config.popularity_dispersion * pop_rng.standard_normal(config.n_drugs))
    if config.state_weights is not None:
        weights = np.asarray(config.state_weights, dtype=float)
    else:
        weights = np.exp(config.state_weight_dispersion * pop_rng.standard_normal(config.n_states))
        weights = weights / weights.mean()

    windows = recall_schedule(config, lexicon)
    drug_index = {e.canonical_name: i for i, e in enumerate(lexicon)}
    state_index = {s: j for j, s in enumerate(states)}
    multiplier = np.ones((config.n_drugs, config.n_states, config.n_days))
    boost = np.zeros((config.n_drugs, config.n_states, config.n_days))
    profile = ramp_profile(config.window, config.gamma, config.ramp)
    boost_profile = config.symptom_boost * (profile - 1.0) / (config.gamma - 1.0) if config.gamma > 1 \
        else np.full(config.window, config.symptom_boost)
    for w in windows:
        for s in w.states:
            i, j = drug_index[w.drug], state_index[s]
            span = slice(w.window_start, w.window_end + 1)
            multiplier[i, j, span] = np.maximum(multiplier[i, j, span], profile)
            boost[i, j, span] = np.maximum(boost[i, j, span], boost_profile)

    pairs = [(i, j) for i in range(config.n_drugs) for j in range(config.n_states)]
    streams = parallel_map(lambda p: _stream_counts(config, p[0], p[1], popularity[p[0]] * weights[p[1]],
                                                    multiplier[p[0], p[1]], boost[p[0], p[1]]),
                           pairs, threads=threads)
    counts = {}
    for (i, j), (total, symptom) in zip(pairs, streams):
        for day in np.flatnonzero(total):
            counts[(lexicon[i].canonical_name, states[j], int(day))] = (int(total[day]), int(symptom[day]))
    rx_otc = {e.canonical_name: e.rx_otc for e in lexicon}
    cube = CountCube.from_counts(counts, n_days=config.n_days, rx_otc=rx_otc, states=states)

    study = config.study_window
    recalls = [RecallRecord(drug=w.drug, initiation_date=study.date_of(w.recall_day), day=w.recall_day,
                            states=w.states, classification=w.classification, rx_otc=w.rx_otc,
                            nationwide=w.nationwide)
               for w in windows]
    truth = InjectionTruth(seed=config.seed, ramp=config.ramp, symptom_boost=config.symptom_boost, windows=windows)
    logger.info(f"Synthesized {config.n_drugs} drugs x {config.n_states} states x {config.n_days} days: "
                f"{int(cube.cells['total_count'].sum())} queries, {len(recalls)} recalls")
    return SynthResult(config=config, lexicon=lexicon, symptoms=SymptomLexicon(phrases=SYMPTOM_PHRASES), cube=cube,
                       recalls=recalls, truth=truth, popularity=popularity.tolist(), state_weights=weights.tolist())


def expand_to_query_log(result: SynthResult) -> List[dict]:
    """
    One templated query per counted occurrence: "<brand> <symptom phrase>" for the symptom
    channel, "<brand> <plain word>" otherwise. Rows come out ordered by (day, state, drug).
    """
    config = result.config
    study = config.study_window
    names = {e.canonical_name: e.names() for e in result.lexicon}
    symptoms = sorted(result.symptoms.phrases)
    cells = result.cube.cells.sort_values(['day', 'state', 'drug'], kind='mergesort')
    rng = _rng(config.seed, _QUERIES)
    rows = []
    for drug, state, day, total, symptom in cells.itertuples(index=False, name=None):
        date = study.date_of(int(day)).isoformat()
        choices = names[drug]
        picks = rng.integers(len(choices), size=total)
        users = rng.integers(10 ** 6, size=total)
        phrases = rng.integers(len(symptoms), size=symptom)
        plain = rng.integers(len(PLAIN_SUFFIXES), size=total - symptom)
        for q in range(total):
            suffix = symptoms[phrases[q]] if q < symptom else PLAIN_SUFFIXES[plain[q - symptom]]
            rows.append({'user_id': f'u{users[q]:06d}', 'date': date, 'state': state,
                         'text': f'{choices[picks[q]]} {suffix}'})
    logger.info(f"Expanded count cube into {len(rows)} query log rows")
    return rows
