import logging
from typing import List, Sequence, Union

import numpy as np
from pydantic import BaseModel

from recall_sentinel.cli import CONSTS
from recall_sentinel.cli.exceptions import InsufficientDataError
from recall_sentinel.models.Ensemble.ensemble import Ensemble
from recall_sentinel.models.Ensemble.linear import LinearMember, term_attributes

logger = logging.getLogger(__name__)


class AttributeImportance(BaseModel):
    attribute: str
    credited_members: int
    credited_fraction: float


class ImportanceReport(BaseModel):
    alpha: float
    corrected_alpha: float
    fraction_threshold: float
    n_valid_members: int
    attributes: List[AttributeImportance]
    important: List[str]


def attribute_importance(ensemble: Union[Ensemble, Sequence[LinearMember]], alpha: float = CONSTS.IMPORTANCE_ALPHA,
                         fraction_threshold: float = CONSTS.IMPORTANCE_FRACTION,
                         attribute_names: Sequence[str] = CONSTS.ATTRIBUTE_NAMES) -> ImportanceReport:
    """
    A term is significant in a member when p < alpha / n_terms; an attribute is credited
    in a member when any significant term involves it, alone or in an interaction.
    """
    members = ensemble.members if isinstance(ensemble, Ensemble) else list(ensemble)
    if isinstance(ensemble, Ensemble):
        attribute_names = ensemble.attribute_names
    valid = [m for m in members if m.stats_valid and m.p_values is not None]
    if not valid:
        raise InsufficientDataError('No ensemble member has valid coefficient statistics')

    terms = term_attributes(len(attribute_names))
    corrected = alpha / len(terms)
    credited = np.zeros(len(attribute_names), dtype=int)
    for member in valid:
        p_values = np.asarray(member.p_values, dtype=float)
        hit = set()
        for term in np.flatnonzero(p_values < corrected):
            hit.update(terms[term])
        for a in hit:
            credited[a] += 1

    fractions = credited / len(valid)
    rows = [AttributeImportance(attribute=name, credited_members=int(c), credited_fraction=float(f))
            for name, c, f in zip(attribute_names, credited, fractions)]
    important = [r.attribute for r in rows if r.credited_fraction >= fraction_threshold]
    logger.info(f"Attribute importance over {len(valid)} members: {important or 'none'} at or above {fraction_threshold:.0%}")
    return ImportanceReport(alpha=alpha, corrected_alpha=corrected, fraction_threshold=fraction_threshold,
                            n_valid_members=len(valid), attributes=rows, important=important)
