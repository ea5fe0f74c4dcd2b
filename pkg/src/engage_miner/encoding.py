"""Encode assembled student feature vectors as a transaction database.

Each present field becomes one attribute=value item, so a record
contributes at most one item per attribute and absent fields are simply
omitted (association mining tolerates absent attributes). Multi-valued
attributes are handled by this token encoding, so the miners never face
the binomial-only restriction tree-based miners are usually quoted with.

Grade attributes have two bucketing modes: ``exact-10s`` keeps the rounded
value, ``banded`` groups the rounded values into four letter-grade-like
intervals, which is what interval-shaped rule consequents are mined from.
"""

from __future__ import annotations

from typing import Sequence

from .etl import GRADE_FIELDS, METRIC_FIELDS, StudentFeatureVector
from .itemsets import Item, Itemset, TransactionDb

ENGAGEMENT_LEVELS = ("L", "M", "H")

# (label, inclusive lower bound); evaluated highest first.
GRADE_BANDS = (("90+", 90), ("70-89", 70), ("50-69", 50), ("<50", 0))
GRADE_BAND_LABELS = tuple(label for label, _ in GRADE_BANDS)


def grade_band(value: float) -> str:
    for label, lo in GRADE_BANDS:
        if value >= lo:
            return label
    return GRADE_BANDS[-1][0]


def encode_feature_vectors(
    vectors: Sequence[StudentFeatureVector], grade_bucketing: str = "banded"
) -> TransactionDb:
    """One transaction per student; record ids are the student ids."""
    if grade_bucketing not in ("banded", "exact-10s"):
        raise ValueError(f"unknown grade bucketing {grade_bucketing!r}")
    banded = grade_bucketing == "banded"

    transactions: list[Itemset] = []
    record_ids: list[str] = []
    universe: dict[str, set[int | str]] = {f: set() for f in METRIC_FIELDS}
    universe["engagement_level"] = set(ENGAGEMENT_LEVELS)
    for f in GRADE_FIELDS:
        universe[f] = set(GRADE_BAND_LABELS) if banded else set()

    for v in vectors:
        items: list[Item] = []
        for f in METRIC_FIELDS:
            value = getattr(v, f)
            if value is not None:
                items.append(Item(f, value))
                universe[f].add(value)
        if v.engagement_level is not None:
            items.append(Item("engagement_level", v.engagement_level))
        for f in GRADE_FIELDS:
            value = getattr(v, f)
            if value is not None:
                token = grade_band(value) if banded else value
                items.append(Item(f, token))
                universe[f].add(token)
        transactions.append(Itemset(items))
        record_ids.append(v.student_id)

    return TransactionDb(transactions, record_ids, universe)
