"""Pure-Python counting kernels.

Transactions are arbitrary-width integer bitmasks, so subset containment
is two bitwise ops per transaction; sequence containment is one forward
scan. This backend is the fallback when the compiled extension is not
built, and the reference the compiled backend is checked against.
"""

from __future__ import annotations

from typing import Sequence

NAME = "python"


def pack_masks(masks: Sequence[int], n_bits: int) -> list[int]:
    """Big-int masks need no repacking."""
    return list(masks)


def count_subsets(packed: list[int], queries: Sequence[int], n_bits: int) -> list[int]:
    """For each query mask, count transactions t with t & q == q."""
    return [sum(1 for t in packed if t & q == q) for q in queries]


def pack_sequences(sequences: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    return [tuple(s) for s in sequences]


def count_subsequences(
    packed: list[tuple[int, ...]], patterns: Sequence[Sequence[int]]
) -> list[int]:
    """For each pattern, count sequences containing it as an order-preserving
    (not necessarily contiguous) subsequence."""
    return [sum(1 for seq in packed if _contains(seq, p)) for p in patterns]


def _contains(seq: tuple[int, ...], pattern: Sequence[int]) -> bool:
    if not pattern:
        return True
    j = 0
    last = len(pattern)
    for tok in seq:
        if tok == pattern[j]:
            j += 1
            if j == last:
                return True
    return False
