"""FP-tree construction and pattern-growth mining.

Two database scans build a prefix tree over the frequent items in global
support-descending order (ties broken canonically); mining then grows
patterns from per-item conditional trees, least-frequent header entries
first, without generating candidates. Supports are exact integer counts
over the original transaction total.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DepthLimitError, EmptyDatabaseError
from .itemsets import Item, Itemset, TransactionDb, minimum_count

MAX_GROWTH_DEPTH = 64


class FPNode:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item: Item | None, parent: "FPNode | None"):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children: dict[Item, FPNode] = {}


class FPTree:
    """Prefix tree plus header table (item -> its nodes, in order F).

    ``order`` maps each frequent item to its position in F; every
    root-to-leaf path lists items in strictly increasing position.
    """

    __slots__ = ("root", "header", "order", "n_transactions", "min_support")

    def __init__(self, order: dict[Item, int], n_transactions: int, min_support: float):
        self.root = FPNode(None, None)
        self.header: dict[Item, list[FPNode]] = {it: [] for it in order}
        self.order = order
        self.n_transactions = n_transactions
        self.min_support = min_support

    def insert(self, items: Sequence[Item], count: int) -> None:
        node = self.root
        for it in items:
            child = node.children.get(it)
            if child is None:
                child = FPNode(it, node)
                node.children[it] = child
                self.header[it].append(child)
            child.count += count
            node = child

    def item_count(self, item: Item) -> int:
        return sum(n.count for n in self.header.get(item, ()))


def build_fp_tree(db: TransactionDb, min_support: float) -> FPTree:
    """Two scans: count items and fix F, then insert projected transactions."""
    if len(db) == 0:
        raise EmptyDatabaseError("cannot build an FP-tree from an empty database")
    m = len(db)
    threshold = minimum_count(min_support, m)

    counts: dict[Item, int] = {}
    for t in db.transactions:
        for it in t:
            counts[it] = counts.get(it, 0) + 1
    frequent = sorted(
        (it for it, c in counts.items() if c >= threshold),
        key=lambda it: (-counts[it], it.sort_key()),
    )
    order = {it: i for i, it in enumerate(frequent)}

    tree = FPTree(order, m, min_support)
    for t in db.transactions:
        projection = sorted((it for it in t if it in order), key=order.__getitem__)
        if projection:
            tree.insert(projection, 1)
    return tree


def pattern_counts(
    tree: FPTree, min_support: float, max_len: int | None = None
) -> dict[tuple[Item, ...], int]:
    """Frequent itemsets as canonical item tuples with exact integer counts."""
    threshold = minimum_count(min_support, tree.n_transactions)
    found: list[tuple[tuple[Item, ...], int]] = []
    _grow(tree.header, tree.order, (), threshold, max_len, 1, found)
    return {tuple(sorted(items, key=Item.sort_key)): c for items, c in found}


def fp_growth(
    tree: FPTree, min_support: float, max_len: int | None = None
) -> list[tuple[Itemset, float]]:
    """Mine every frequent itemset from the tree; equals the level-wise
    miner's output as a set, with identical support values."""
    m = tree.n_transactions
    pairs = [
        (Itemset(items), c / m)
        for items, c in pattern_counts(tree, min_support, max_len).items()
    ]
    pairs.sort(key=lambda p: (len(p[0]), p[0].sort_key()))
    return pairs


def _grow(
    header: dict[Item, list[FPNode]],
    order: dict[Item, int],
    suffix: tuple[Item, ...],
    threshold: int,
    max_len: int | None,
    depth: int,
    found: list[tuple[tuple[Item, ...], int]],
) -> None:
    if depth > MAX_GROWTH_DEPTH:
        raise DepthLimitError(f"pattern growth exceeded depth {MAX_GROWTH_DEPTH}")
    # Least-frequent first: header preserves F order, so iterate reversed.
    for item in reversed(list(header)):
        nodes = header[item]
        count = sum(n.count for n in nodes)
        if count < threshold:
            continue
        pattern = (item,) + suffix
        found.append((pattern, count))
        if max_len is not None and len(pattern) >= max_len:
            continue
        base = _conditional_pattern_base(nodes)
        cond = _conditional_header(base, order, threshold)
        if cond:
            _grow(cond, order, pattern, threshold, max_len, depth + 1, found)


def _conditional_pattern_base(
    nodes: Iterable[FPNode],
) -> list[tuple[list[Item], int]]:
    """Prefix paths co-occurring with one item, each weighted by its count."""
    base = []
    for node in nodes:
        path: list[Item] = []
        parent = node.parent
        while parent is not None and parent.item is not None:
            path.append(parent.item)
            parent = parent.parent
        if path:
            path.reverse()
            base.append((path, node.count))
    return base


def _conditional_header(
    base: list[tuple[list[Item], int]],
    order: dict[Item, int],
    threshold: int,
) -> dict[Item, list[FPNode]]:
    """Build a conditional tree from weighted prefix paths; returns its header."""
    counts: dict[Item, int] = {}
    for path, weight in base:
        for it in path:
            counts[it] = counts.get(it, 0) + weight
    keep = {it for it, c in counts.items() if c >= threshold}
    if not keep:
        return {}
    header: dict[Item, list[FPNode]] = {
        it: [] for it in sorted(keep, key=order.__getitem__)
    }
    root = FPNode(None, None)
    for path, weight in base:
        node = root
        for it in path:
            if it not in keep:
                continue
            child = node.children.get(it)
            if child is None:
                child = FPNode(it, node)
                node.children[it] = child
                header[it].append(child)
            child.count += weight
            node = child
    return header
