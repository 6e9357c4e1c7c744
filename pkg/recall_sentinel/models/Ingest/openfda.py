"""Best-effort mapping of openFDA drug enforcement reports onto the native recall rows."""
import datetime
import logging
import re
from typing import List, Tuple, Union

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.cli_models.generic_models import RowError
from recall_sentinel.cli.exceptions import InputFormatError
from recall_sentinel.models.Lexicon import normalize_text

logger = logging.getLogger(__name__)

_CLASS_PATTERN = re.compile(r'^\s*(?:class\s+)?(i{1,3})\s*$', flags=re.IGNORECASE)
_CODE_PATTERN = re.compile(r'\b([A-Z]{2})\b')
_NATIONWIDE_PATTERN = re.compile(r'\b(nationwide|nation wide|nationally|all states|throughout the (?:us|u\.s\.|united states))\b',
                                 flags=re.IGNORECASE)
_PRODUCT_TYPES = {'HUMAN PRESCRIPTION DRUG': CONSTS.RX, 'HUMAN OTC DRUG': CONSTS.OTC}


def parse_openfda_date(raw: str) -> datetime.date:
    raw = (raw or '').strip()
    if re.fullmatch(r'\d{8}', raw):
        return datetime.date(int(raw[:4]), int(raw[4:6]), int(raw[6:]))
    return datetime.date.fromisoformat(raw)


def parse_classification(raw: str) -> str:
    match = _CLASS_PATTERN.match(raw or '')
    if not match:
        raise ValueError(f"unrecognised classification {raw!r}")
    return match.group(1).upper()


def parse_distribution(raw: str) -> Union[str, List[str]]:
    """'nationwide' when the text says so, else every state code or full state name it mentions."""
    raw = raw or ''
    if _NATIONWIDE_PATTERN.search(raw):
        return CONSTS.NATIONWIDE
    states = {code for code in _CODE_PATTERN.findall(raw) if code in CONSTS.US_STATES}
    upper = ' ' + re.sub(r'[^A-Z]+', ' ', raw.upper()) + ' '
    for name, code in CONSTS.STATE_NAMES.items():
        if f' {name} ' in upper:
            # "WEST VIRGINIA" also contains "VIRGINIA"
            if name == 'VIRGINIA' and upper.count(' VIRGINIA ') == upper.count(' WEST VIRGINIA '):
                continue
            states.add(code)
    if not states:
        raise ValueError(f"no state found in distribution pattern {raw[:80]!r}")
    return sorted(states)


def _drug_name(report: dict) -> str:
    openfda = report.get('openfda') or {}
    for key in ('generic_name', 'substance_name', 'brand_name'):
        names = openfda.get(key) or []
        if isinstance(names, str):
            names = [names]
        if names:
            return normalize_text(names[0])
    words = normalize_text(report.get('product_description', '')).split(' ')
    return ' '.join(w for w in words[:2] if w and not w[0].isdigit())


def _rx_otc(report: dict) -> str:
    product_types = (report.get('openfda') or {}).get('product_type') or []
    if isinstance(product_types, str):
        product_types = [product_types]
    for product_type in product_types:
        mapped = _PRODUCT_TYPES.get(product_type.strip().upper())
        if mapped:
            return mapped
    return CONSTS.UNCLASSIFIED


def convert_openfda(payload) -> Tuple[List[dict], List[RowError]]:
    """
    Accepts a JSON array of enforcement reports or an API response object with `results`.
    Returns native recall rows, in input order, and one RowError per report that could
    not be mapped (line = 1-based position of the report).
    """
    if isinstance(payload, dict):
        payload = payload.get('results')
    if not isinstance(payload, list):
        raise InputFormatError('openFDA payload must be a JSON array or an object with a "results" array')

    rows, errors = [], []
    for position, report in enumerate(payload, start=1):
        if not isinstance(report, dict):
            errors.append(RowError(line=position, reason='report is not a JSON object'))
            continue
        try:
            drug = _drug_name(report)
            if not drug:
                raise ValueError('no drug name in openfda fields or product_description')
            rows.append({'drug': drug,
                         'initiation_date': parse_openfda_date(report.get('recall_initiation_date')).isoformat(),
                         'distribution': parse_distribution(report.get('distribution_pattern')),
                         'classification': parse_classification(report.get('classification')),
                         'rx_otc': _rx_otc(report)})
        except (ValueError, TypeError, AttributeError) as e:
            errors.append(RowError(line=position, reason=str(e)))
    logger.info(f"Converted {len(rows)} openFDA reports, {len(errors)} could not be mapped")
    return rows, errors
