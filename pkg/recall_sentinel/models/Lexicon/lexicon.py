import csv
import io
import logging
import re
from collections import defaultdict
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple, Union

from pydantic import BaseModel, validator

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.cli_models.generic_models import RowError
from recall_sentinel.cli.exceptions import LexiconFormatError

logger = logging.getLogger(__name__)

_PUNCTUATION = re.compile(r'[^\w\s]|_', flags=re.UNICODE)
_WHITESPACE = re.compile(r'\s+', flags=re.UNICODE)


def normalize_text(raw: str) -> str:
    """Lowercase, turn punctuation into spaces and collapse whitespace."""
    if not raw:
        return ''
    text = _PUNCTUATION.sub(' ', raw.lower())
    return _WHITESPACE.sub(' ', text).strip()


class DrugEntry(BaseModel):
    canonical_name: str
    brand_names: List[str] = []
    rx_otc: str = CONSTS.UNCLASSIFIED

    @validator('canonical_name')
    def canonical_not_empty(cls, v):
        v = normalize_text(v)
        if not v:
            raise ValueError('canonical name is empty')
        return v

    @validator('brand_names', each_item=True)
    def normalize_brand(cls, v):
        return normalize_text(v)

    @validator('brand_names')
    def drop_empty_brands(cls, v):
        return [b for b in dict.fromkeys(v) if b]

    @validator('rx_otc')
    def known_rx_otc(cls, v):
        v = v.strip().upper()
        if v not in CONSTS.RX_OTC_VALUES:
            raise ValueError(f"rx_otc must be one of {CONSTS.RX_OTC_VALUES}, not {v!r}")
        return v

    def names(self) -> List[str]:
        return [self.canonical_name] + self.brand_names


class SymptomLexicon(BaseModel):
    phrases: FrozenSet[str]

    @validator('phrases', pre=True)
    def normalize_phrases(cls, v):
        return frozenset(p for p in (normalize_text(x) for x in v) if p)


class PhraseMatcher:
    """Whole-token phrase lookup indexed by first token."""

    def __init__(self, phrases: Iterable[Tuple[str, str]]):
        # phrase text -> label; label is what a hit reports
        self._index: Dict[str, List[Tuple[Tuple[str, ...], str]]] = defaultdict(list)
        for phrase, label in phrases:
            tokens = tuple(phrase.split(' '))
            if tokens and tokens[0]:
                self._index[tokens[0]].append((tokens, label))

    def find(self, query: str, first_only=False) -> Set[str]:
        hits = set()
        if not query:
            return hits
        tokens = query.split(' ')
        for i, token in enumerate(tokens):
            for phrase, label in self._index.get(token, ()):
                if tuple(tokens[i:i + len(phrase)]) == phrase:
                    hits.add(label)
                    if first_only:
                        return hits
        return hits


class DrugLexicon:
    def __init__(self, entries: Sequence[DrugEntry]):
        seen = set()
        for entry in entries:
            if entry.canonical_name in seen:
                raise ValueError(f"Duplicate canonical name in drug lexicon: {entry.canonical_name}")
            seen.add(entry.canonical_name)
        self.entries = list(entries)
        self.matcher = PhraseMatcher((name, e.canonical_name) for e in self.entries for name in e.names())

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def canonical_names(self) -> List[str]:
        return [e.canonical_name for e in self.entries]

    @property
    def rx_otc(self) -> Dict[str, str]:
        return {e.canonical_name: e.rx_otc for e in self.entries}


@lru_cache(maxsize=8)
def symptom_matcher(phrases: FrozenSet[str]) -> PhraseMatcher:
    return PhraseMatcher((p, p) for p in phrases)


def _as_drug_lexicon(lexicon: Union[DrugLexicon, Sequence[DrugEntry]]) -> DrugLexicon:
    return lexicon if isinstance(lexicon, DrugLexicon) else DrugLexicon(lexicon)


def match_drugs(query: str, lexicon: Union[DrugLexicon, Sequence[DrugEntry]]) -> Set[str]:
    return _as_drug_lexicon(lexicon).matcher.find(query)


def contains_symptom(query: str, lexicon: SymptomLexicon) -> bool:
    return bool(symptom_matcher(lexicon.phrases).find(query, first_only=True))


def load_drug_lexicon(stream, source='<drug lexicon>') -> DrugLexicon:
    """Parse `canonical,brands,rx_otc` CSV; any bad row rejects the whole file."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ['canonical', 'brands', 'rx_otc']:
        raise LexiconFormatError(source, [RowError(line=1, reason=f"expected header canonical,brands,rx_otc, got {header}")])

    entries, errors, seen = [], [], set()
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            errors.append(RowError(line=line, reason=f"expected 3 columns, got {len(row)}"))
            continue
        canonical, brands, rx_otc = row
        try:
            entry = DrugEntry(canonical_name=canonical,
                              brand_names=[b for b in brands.split('|') if b.strip()],
                              rx_otc=rx_otc)
        except ValueError as e:
            errors.append(RowError(line=line, reason=str(e).replace('\n', ' ')))
            continue
        if entry.canonical_name in seen:
            errors.append(RowError(line=line, reason=f"duplicate canonical name {entry.canonical_name!r}"))
            continue
        seen.add(entry.canonical_name)
        entries.append(entry)

    if errors:
        raise LexiconFormatError(source, errors)
    logger.info(f"Loaded {len(entries)} drugs from {source}")
    return DrugLexicon(entries)


def load_symptom_lexicon(stream, source='<symptom lexicon>') -> SymptomLexicon:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    phrases = []
    for line in stream:
        line = line.split('#', 1)[0].strip()
        if line:
            phrases.append(line)
    lexicon = SymptomLexicon(phrases=phrases)
    if not lexicon.phrases:
        raise LexiconFormatError(source, [RowError(line=0, reason='no symptom phrases')])
    logger.info(f"Loaded {len(lexicon.phrases)} symptom phrases from {source}")
    return lexicon


def write_drug_lexicon(lexicon: Union[DrugLexicon, Sequence[DrugEntry]], stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['canonical', 'brands', 'rx_otc'])
    for entry in _as_drug_lexicon(lexicon):
        writer.writerow([entry.canonical_name, '|'.join(entry.brand_names), entry.rx_otc])


def write_symptom_lexicon(lexicon: SymptomLexicon, stream):
    stream.write('# one phrase per line\n')
    for phrase in sorted(lexicon.phrases):
        stream.write(phrase + '\n')
