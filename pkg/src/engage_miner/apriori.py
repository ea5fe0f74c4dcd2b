"""Level-wise (breadth-first) frequent-itemset mining and rule generation.

Size-k candidates are joined from frequent (k-1)-itemsets sharing their
first k-2 items, pruned by downward closure (every (k-1)-subset must be
frequent), and counted in one kernel batch per level. Iteration stops when
a level comes back empty or the configured size cap is reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .config import MiningConfig
from .errors import EmptyDatabaseError, MalformedLevelError
from .itemsets import (
    AssociationRule,
    Item,
    Itemset,
    RuleMetrics,
    TransactionDb,
    minimum_count,
)


@dataclass
class FrequentItemsetTable:
    """Frequent itemsets grouped by size, each with its exact support."""

    levels: dict[int, list[tuple[Itemset, float]]] = field(default_factory=dict)
    min_support: float = 0.0

    def itemsets(self) -> list[Itemset]:
        """All frequent itemsets, size ascending then canonical order."""
        out: list[Itemset] = []
        for k in sorted(self.levels):
            out.extend(x for x, _ in self.levels[k])
        return out

    def supports(self) -> dict[Itemset, float]:
        return {x: s for level in self.levels.values() for x, s in level}

    def __len__(self) -> int:
        return sum(len(level) for level in self.levels.values())


def _tuple_key(items: tuple[Item, ...]) -> tuple:
    return tuple(it.sort_key() for it in items)


def _join_level(prev: list[tuple[Item, ...]]) -> list[tuple[Item, ...]]:
    """Join canonical (k-1)-tuples sharing their first k-2 items and prune
    candidates having any infrequent (k-1)-subset (full subset test)."""
    prev_set = set(prev)
    ordered = sorted(prev, key=_tuple_key)
    candidates: list[tuple[Item, ...]] = []
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            if a[:-1] != b[:-1]:
                # ordered by prefix, so no later b can match either
                break
            if a[-1].attribute == b[-1].attribute:
                # two values of one attribute never co-occur in a record
                continue
            cand = a + (b[-1],)
            if all(
                cand[:j] + cand[j + 1 :] in prev_set for j in range(len(cand))
            ):
                candidates.append(cand)
    return candidates


def candidate_join(prev_level: Sequence[Itemset]) -> list[Itemset]:
    """Join frequent (k-1)-itemsets into size-k candidates and prune."""
    if not prev_level:
        return []
    k_prev = len(prev_level[0])
    if k_prev < 1:
        raise MalformedLevelError("level itemsets must be nonempty")
    seen = set()
    for x in prev_level:
        if len(x) != k_prev:
            raise MalformedLevelError(
                f"mixed itemset sizes in level: {len(x)} vs {k_prev}"
            )
        if x in seen:
            raise MalformedLevelError(f"duplicate itemset in level: {x}")
        seen.add(x)
    joined = _join_level([x.items for x in prev_level])
    return sorted((Itemset(t) for t in joined), key=Itemset.sort_key)


def _apriori_counts(
    db: TransactionDb, min_support: float, max_len: int | None = None
) -> dict[tuple[Item, ...], int]:
    """Level-wise mining on canonical item tuples; exact integer counts."""
    if len(db) == 0:
        raise EmptyDatabaseError("cannot mine an empty database")
    threshold = minimum_count(min_support, len(db))
    out: dict[tuple[Item, ...], int] = {}
    current: list[tuple[Item, ...]] = [(it,) for it in db.observed_items()]
    k = 1
    while current and (max_len is None or k <= max_len):
        counts = db.count_many(current)
        level = [(t, c) for t, c in zip(current, counts) if c >= threshold]
        if not level:
            break
        out.update(level)
        current = _join_level([t for t, _ in level])
        k += 1
    return out


def frequent_itemsets_apriori(
    db: TransactionDb, min_support: float, max_len: int | None = None
) -> FrequentItemsetTable:
    """Every itemset whose support meets ``min_support``, mined level-wise."""
    m = len(db)
    table = FrequentItemsetTable(min_support=min_support)
    for t, c in _apriori_counts(db, min_support, max_len).items():
        table.levels.setdefault(len(t), []).append((Itemset(t), c / m))
    for level in table.levels.values():
        level.sort(key=lambda pair: pair[0].sort_key())
    return table


def _frequent_counts(db: TransactionDb, cfg: MiningConfig) -> dict[tuple[Item, ...], int]:
    if cfg.algorithm == "fpgrowth":
        from .fpgrowth import build_fp_tree, pattern_counts

        tree = build_fp_tree(db, cfg.min_support)
        return pattern_counts(tree, cfg.min_support, max_len=cfg.max_rule_len)
    return _apriori_counts(db, cfg.min_support, max_len=cfg.max_rule_len)


def mine_rules(
    db: TransactionDb, cfg: MiningConfig
) -> list[tuple[AssociationRule, RuleMetrics]]:
    """All rules meeting the config thresholds, sorted lift-desc.

    Expansion reuses the miner's integer counts: by downward closure every
    subset of a frequent itemset is itself in the frequent table, so no
    recounting pass is needed. Both algorithm back ends feed the same
    expansion and ordering, so for identical inputs they produce identical
    rule lists.
    """
    counts = _frequent_counts(db, cfg)
    m = len(db)
    rules: list[tuple[AssociationRule, RuleMetrics]] = []
    for t in sorted((t for t in counts if len(t) >= 2), key=lambda t: (len(t), _tuple_key(t))):
        c_all = counts[t]
        support = c_all / m
        for size in range(1, len(t)):
            for x in combinations(t, size):
                conf = c_all / counts[x]
                if conf < cfg.min_confidence:
                    continue
                in_x = set(x)
                y = tuple(it for it in t if it not in in_x)
                lift_value = (c_all * m) / (counts[x] * counts[y])
                if lift_value <= cfg.min_lift:
                    continue
                rules.append(
                    (
                        AssociationRule(Itemset(x), Itemset(y)),
                        RuleMetrics(support, conf, lift_value),
                    )
                )
    rules.sort(key=_rule_order)
    return rules


def _rule_order(entry: tuple[AssociationRule, RuleMetrics]) -> tuple:
    rule, met = entry
    return (
        -met.lift,
        -met.confidence,
        len(rule.antecedent),
        rule.antecedent.sort_key(),
        len(rule.consequent),
        rule.consequent.sort_key(),
    )
