"""Definition-level brute-force oracles for the miners.

Everything here counts directly from the definitions with plain Python
set and sequence operations -- no bitmask kernels, no candidate joins, no
trees -- so property tests compare two genuinely independent paths.

Candidate itemsets are enumerated from the powersets of the transactions
themselves: any itemset passing a positive support threshold occurs in at
least one transaction, so nothing qualifying can be missed.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Sequence

from .errors import EmptyDatabaseError, InvalidThresholdError, OracleSizeError
from .gsp import EventSequence, SequencePattern
from .itemsets import AssociationRule, Itemset, RuleMetrics, TransactionDb

MAX_UNIVERSE_ITEMS = 20
MAX_TRANSACTION_ITEMS = 16
MAX_SEQ_ALPHABET = 6
MAX_SEQ_COUNT = 15
MAX_SEQ_PATTERN_LEN = 4


def brute_force_frequent_itemsets(
    db: TransactionDb, min_support: float
) -> list[tuple[Itemset, float]]:
    """Exhaustive frequent-itemset enumeration with exact supports."""
    if not 0.0 < min_support <= 1.0:
        raise InvalidThresholdError(f"min_support must be in (0, 1], got {min_support}")
    if len(db) == 0:
        raise EmptyDatabaseError("oracle is undefined on an empty database")
    n_universe = sum(len(values) for values in db.item_universe.values())
    if n_universe > MAX_UNIVERSE_ITEMS:
        raise OracleSizeError(
            f"universe has {n_universe} items; oracle cap is {MAX_UNIVERSE_ITEMS}"
        )
    for t in db.transactions:
        if len(t) > MAX_TRANSACTION_ITEMS:
            raise OracleSizeError(
                f"transaction of {len(t)} items exceeds oracle cap "
                f"{MAX_TRANSACTION_ITEMS}"
            )

    transaction_sets = [frozenset(t.items) for t in db.transactions]
    m = len(transaction_sets)
    candidates = set()
    for t in transaction_sets:
        items = sorted(t, key=lambda it: it.sort_key())
        for size in range(1, len(items) + 1):
            candidates.update(combinations(items, size))

    out = []
    for cand in candidates:
        cand_set = frozenset(cand)
        count = sum(1 for t in transaction_sets if cand_set <= t)
        if count / m >= min_support:
            out.append((Itemset(cand), count / m))
    out.sort(key=lambda e: (len(e[0]), e[0].sort_key()))
    return out


def brute_force_rules(
    db: TransactionDb,
    min_support: float,
    min_confidence: float,
    min_lift: float,
) -> list[tuple[AssociationRule, RuleMetrics]]:
    """All rules whose union is frequent and that pass both filters.

    Metrics come from direct containment counts over the raw transactions;
    the lift filter is strict, matching the miner's convention.
    """
    transaction_sets = [frozenset(t.items) for t in db.transactions]
    m = len(transaction_sets)

    def count(items: frozenset) -> int:
        return sum(1 for t in transaction_sets if items <= t)

    out = []
    for itemset, _ in brute_force_frequent_itemsets(db, min_support):
        if len(itemset) < 2:
            continue
        all_items = frozenset(itemset.items)
        c_all = count(all_items)
        items = sorted(all_items, key=lambda it: it.sort_key())
        for size in range(1, len(items)):
            for antecedent in combinations(items, size):
                x = frozenset(antecedent)
                y = all_items - x
                c_x, c_y = count(x), count(y)
                if c_x == 0 or c_y == 0:
                    continue
                conf = c_all / c_x
                lift_value = (c_all * m) / (c_x * c_y)
                if conf >= min_confidence and lift_value > min_lift:
                    out.append(
                        (
                            AssociationRule(Itemset(x), Itemset(y)),
                            RuleMetrics(c_all / m, conf, lift_value),
                        )
                    )
    return out


def brute_force_sequences(
    sequences: Sequence[EventSequence], min_support: float, max_len: int
) -> list[SequencePattern]:
    """Enumerate every token tuple up to max_len and count containment."""
    if not 0.0 < min_support <= 1.0:
        raise InvalidThresholdError(f"min_support must be in (0, 1], got {min_support}")
    if not 1 <= max_len <= MAX_SEQ_PATTERN_LEN:
        raise OracleSizeError(f"max_len {max_len} outside [1, {MAX_SEQ_PATTERN_LEN}]")
    if len(sequences) > MAX_SEQ_COUNT:
        raise OracleSizeError(
            f"{len(sequences)} sequences exceed oracle cap {MAX_SEQ_COUNT}"
        )
    if not sequences:
        return []
    alphabet = sorted({tok for s in sequences for tok in s.events})
    if len(alphabet) > MAX_SEQ_ALPHABET:
        raise OracleSizeError(
            f"alphabet of {len(alphabet)} exceeds oracle cap {MAX_SEQ_ALPHABET}"
        )

    m = len(sequences)
    out = []
    for length in range(1, max_len + 1):
        for pattern in product(alphabet, repeat=length):
            count = sum(1 for s in sequences if _is_subsequence(pattern, s.events))
            if count / m >= min_support:
                out.append(SequencePattern(elements=pattern, support=count / m))
    out.sort(key=lambda p: (len(p.elements), p.elements))
    return out


def _is_subsequence(pattern: tuple[str, ...], seq: tuple[str, ...]) -> bool:
    it = iter(seq)
    return all(tok in it for tok in pattern)
