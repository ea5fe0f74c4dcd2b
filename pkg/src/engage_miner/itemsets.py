"""Items, itemsets, transaction databases, and the three rule metrics.

Every metric reduces to integer co-occurrence counts over the database;
each returned fraction is one division of two exact integers, so equal
counts always produce bit-identical floats and there is no accumulated
rounding. Counting itself is delegated to the bitmask kernels: each
observed item gets one bit, each transaction becomes a mask, and
containment is a bitwise subset test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from . import kernels
from .errors import (
    EmptyDatabaseError,
    InvalidThresholdError,
    TooSmallItemsetError,
    UndeclaredAttributeError,
    ZeroSupportError,
)

Value = int | str


@dataclass(frozen=True)
class Item:
    """One attribute=value token, the unit every transaction is built from."""

    attribute: str
    value: Value

    def __post_init__(self):
        if not self.attribute:
            raise ValueError("item attribute must be nonempty")

    def sort_key(self) -> tuple:
        # Attribute-lexicographic, then value. Numeric values sort before
        # string values so mixed domains still have a total order.
        if isinstance(self.value, int) and not isinstance(self.value, bool):
            return (self.attribute, 0, self.value, "")
        return (self.attribute, 1, 0, str(self.value))

    def __lt__(self, other: "Item") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.attribute}={self.value}"


class Itemset:
    """An immutable set of items in canonical order, at most one per attribute."""

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[Item] = ()):
        ordered = sorted(set(items), key=Item.sort_key)
        seen: dict[str, Value] = {}
        for it in ordered:
            if it.attribute in seen:
                raise ValueError(
                    f"two values for attribute {it.attribute!r}: "
                    f"{seen[it.attribute]!r} and {it.value!r}"
                )
            seen[it.attribute] = it.value
        self._items: tuple[Item, ...] = tuple(ordered)

    @property
    def items(self) -> tuple[Item, ...]:
        return self._items

    def sort_key(self) -> tuple:
        return tuple(it.sort_key() for it in self._items)

    def attributes(self) -> frozenset[str]:
        return frozenset(it.attribute for it in self._items)

    def union(self, other: "Itemset") -> "Itemset":
        return Itemset(self._items + other._items)

    __or__ = union

    def difference(self, other: "Itemset") -> "Itemset":
        drop = set(other._items)
        return Itemset(it for it in self._items if it not in drop)

    def issubset(self, other: "Itemset") -> bool:
        return set(self._items) <= set(other._items)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Item]:
        return iter(self._items)

    def __contains__(self, item: Item) -> bool:
        return item in self._items

    def __eq__(self, other) -> bool:
        return isinstance(other, Itemset) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "Itemset") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"Itemset({', '.join(map(str, self._items))})"

    def __str__(self) -> str:
        return " & ".join(map(str, self._items)) if self._items else "{}"


@dataclass(frozen=True)
class AssociationRule:
    """antecedent => consequent, both nonempty and disjoint."""

    antecedent: Itemset
    consequent: Itemset

    def __post_init__(self):
        if not len(self.antecedent) or not len(self.consequent):
            raise ValueError("rule sides must be nonempty")
        if set(self.antecedent.items) & set(self.consequent.items):
            raise ValueError("rule sides must be disjoint")

    def __str__(self) -> str:
        return f"{self.antecedent} => {self.consequent}"


@dataclass(frozen=True)
class RuleMetrics:
    support: float
    confidence: float
    lift: float


class TransactionDb:
    """An immutable list of encoded records supporting exact counting queries.

    ``item_universe`` declares each attribute's finite domain; it defaults
    to exactly the observed items. Counting queries may mention any
    declared item (absent ones count 0) but never an undeclared attribute.
    """

    def __init__(
        self,
        transactions: Sequence[Itemset],
        record_ids: Sequence | None = None,
        item_universe: Mapping[str, Iterable[Value]] | None = None,
    ):
        self._transactions = tuple(transactions)
        if record_ids is None:
            record_ids = range(len(self._transactions))
        self._record_ids = tuple(record_ids)
        if len(self._record_ids) != len(self._transactions):
            raise ValueError("one record id per transaction required")

        if item_universe is None:
            universe: dict[str, frozenset[Value]] = {}
            for t in self._transactions:
                for it in t:
                    universe[it.attribute] = universe.get(it.attribute, frozenset()) | {it.value}
            self._universe = universe
        else:
            self._universe = {a: frozenset(vs) for a, vs in item_universe.items()}
            for t in self._transactions:
                for it in t:
                    if it.value not in self._universe.get(it.attribute, frozenset()):
                        raise ValueError(f"transaction item {it} not in item universe")

        observed = sorted({it for t in self._transactions for it in t}, key=Item.sort_key)
        self._bit_of = {it: i for i, it in enumerate(observed)}
        self._n_bits = len(observed)
        masks = []
        for t in self._transactions:
            mask = 0
            for it in t:
                mask |= 1 << self._bit_of[it]
            masks.append(mask)
        self._packed = kernels.pack_masks(masks, self._n_bits)

    @property
    def transactions(self) -> tuple[Itemset, ...]:
        return self._transactions

    @property
    def record_ids(self) -> tuple:
        return self._record_ids

    @property
    def item_universe(self) -> dict[str, frozenset[Value]]:
        return dict(self._universe)

    def observed_items(self) -> list[Item]:
        return sorted(self._bit_of, key=Item.sort_key)

    def __len__(self) -> int:
        return len(self._transactions)

    def count(self, itemset: Itemset) -> int:
        return self.count_many([itemset])[0]

    def count_many(self, itemsets: Sequence[Iterable[Item]]) -> list[int]:
        """Exact containment counts for a batch of itemsets.

        Accepts Itemset instances or plain item tuples (the miners' level
        candidates); both are sized iterables of items.
        """
        m = len(self._transactions)
        counts = [0] * len(itemsets)
        query_masks: list[int] = []
        query_pos: list[int] = []
        for pos, x in enumerate(itemsets):
            mask = 0
            absent = False
            for it in x:
                if it.value not in self._universe.get(it.attribute, frozenset()):
                    if it.attribute not in self._universe:
                        raise UndeclaredAttributeError(
                            f"attribute {it.attribute!r} is not declared in the database"
                        )
                    absent = True
                bit = self._bit_of.get(it)
                if bit is None:
                    absent = True
                else:
                    mask |= 1 << bit
            if absent:
                counts[pos] = 0
            elif len(x) == 0:
                counts[pos] = m
            else:
                query_masks.append(mask)
                query_pos.append(pos)
        if query_masks:
            got = kernels.count_subsets(self._packed, query_masks, self._n_bits)
            for pos, c in zip(query_pos, got):
                counts[pos] = c
        return counts


def support(x: Itemset, db: TransactionDb) -> float:
    """Fraction of transactions containing ``x``; exact count over m."""
    if len(db) == 0:
        raise EmptyDatabaseError("support is undefined on an empty database")
    return db.count(x) / len(db)


def confidence(rule: AssociationRule, db: TransactionDb) -> float:
    """support(X u Y) / support(X): the rule's conditional frequency."""
    if len(db) == 0:
        raise EmptyDatabaseError("confidence is undefined on an empty database")
    c_x, c_xy = db.count_many([rule.antecedent, rule.antecedent | rule.consequent])
    if c_x == 0:
        raise ZeroSupportError(f"antecedent {rule.antecedent} has zero support")
    return c_xy / c_x


def lift(rule: AssociationRule, db: TransactionDb) -> float:
    """support(X u Y) / (support(X) * support(Y)); 1 means independence."""
    if len(db) == 0:
        raise EmptyDatabaseError("lift is undefined on an empty database")
    c_x, c_y, c_xy = db.count_many(
        [rule.antecedent, rule.consequent, rule.antecedent | rule.consequent]
    )
    if c_x == 0 or c_y == 0:
        raise ZeroSupportError(f"rule {rule} has a zero-support side")
    # Single division keeps the value identical for X=>Y and Y=>X.
    return (c_xy * len(db)) / (c_x * c_y)


def rule_metrics(rule: AssociationRule, db: TransactionDb) -> RuleMetrics:
    """All three metrics from one batched counting pass."""
    if len(db) == 0:
        raise EmptyDatabaseError("metrics are undefined on an empty database")
    m = len(db)
    c_x, c_y, c_xy = db.count_many(
        [rule.antecedent, rule.consequent, rule.antecedent | rule.consequent]
    )
    if c_x == 0 or c_y == 0:
        raise ZeroSupportError(f"rule {rule} has a zero-support side")
    return RuleMetrics(
        support=c_xy / m,
        confidence=c_xy / c_x,
        lift=(c_xy * m) / (c_x * c_y),
    )


def minimum_count(min_support: float, m: int) -> int:
    """Smallest integer count c with c/m >= min_support.

    Thresholding on integer counts avoids float comparisons at the level
    boundary while agreeing exactly with the definitional float test.
    """
    if not 0.0 < min_support <= 1.0:
        raise InvalidThresholdError(f"min_support must be in (0, 1], got {min_support}")
    if m <= 0:
        return 1
    c = math.ceil(min_support * m)
    while c > 1 and (c - 1) / m >= min_support:
        c -= 1
    while c <= m and c / m < min_support:
        c += 1
    return max(c, 1)


def rules_from_itemset(
    frequent: Itemset, db: TransactionDb, min_conf: float
) -> list[tuple[AssociationRule, RuleMetrics]]:
    """Expand one frequent itemset into every rule meeting ``min_conf``.

    Enumerates all nonempty proper partitions X => frequent \\ X, antecedent
    size ascending then canonical item order, so output order is stable.
    """
    if len(frequent) < 2:
        raise TooSmallItemsetError(f"cannot partition itemset of size {len(frequent)}")
    if len(db) == 0:
        raise EmptyDatabaseError("rule expansion is undefined on an empty database")
    m = len(db)
    items = list(frequent)
    subsets: list[Itemset] = []
    for size in range(1, len(items)):
        subsets.extend(Itemset(c) for c in combinations(items, size))
    counts = dict(zip(subsets, db.count_many(subsets)))
    c_all = db.count(frequent)
    out: list[tuple[AssociationRule, RuleMetrics]] = []
    for x in subsets:
        c_x = counts[x]
        if c_x == 0:
            continue
        conf = c_all / c_x
        if conf < min_conf:
            continue
        y = frequent.difference(x)
        c_y = counts[y]
        if c_y == 0:
            continue
        out.append(
            (
                AssociationRule(x, y),
                RuleMetrics(
                    support=c_all / m,
                    confidence=conf,
                    lift=(c_all * m) / (c_x * c_y),
                ),
            )
        )
    return out
