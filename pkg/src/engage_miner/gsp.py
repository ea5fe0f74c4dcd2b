"""Sequential pattern mining over per-student chronological event sequences.

Level-wise GSP: frequent length-1 patterns seed the loop, length-k
candidates come from joining frequent (k-1)-patterns whose overlap matches
(drop-first of one equals drop-last of the other), candidates with any
infrequent (k-1)-subsequence are pruned, and survivors are counted by a
subsequence scan. A pattern is contained in a sequence when its tokens
appear in order, not necessarily contiguously; no gap or window
constraints apply.

The flat per-student feature table is not sequential, so this miner runs
on the raw event log instead -- an extension beyond the per-record rule
mining the rest of the package performs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from . import kernels
from .itemsets import minimum_count

DEFAULT_MAX_LEN = 4


class _HasEventFields(Protocol):
    student_id: str
    event_type: str

    @property
    def event_date(self): ...


@dataclass(frozen=True)
class EventSequence:
    """One student's event types in chronological order."""

    student_id: str
    events: tuple[str, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError("event sequence must be nonempty")


@dataclass(frozen=True)
class SequencePattern:
    elements: tuple[str, ...]
    support: float


def build_sequences(records: Iterable[_HasEventFields]) -> list[EventSequence]:
    """One sequence per student, events sorted by timestamp (stable on ties)."""
    ordered = sorted(records, key=lambda r: (r.student_id, r.event_date))
    sequences: list[EventSequence] = []
    current_id: str | None = None
    current_events: list[str] = []
    for rec in ordered:
        if rec.student_id != current_id:
            if current_id is not None:
                sequences.append(EventSequence(current_id, tuple(current_events)))
            current_id = rec.student_id
            current_events = []
        current_events.append(rec.event_type)
    if current_id is not None:
        sequences.append(EventSequence(current_id, tuple(current_events)))
    return sequences


def gsp_mine(
    sequences: Sequence[EventSequence],
    min_support: float,
    max_len: int = DEFAULT_MAX_LEN,
) -> list[SequencePattern]:
    """All subsequence patterns up to ``max_len`` meeting ``min_support``."""
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    minimum_count(min_support, max(len(sequences), 1))  # validates the threshold
    m = len(sequences)
    if m == 0:
        return []
    threshold = minimum_count(min_support, m)

    vocab = sorted({tok for s in sequences for tok in s.events})
    token_id = {tok: i for i, tok in enumerate(vocab)}
    packed = kernels.pack_sequences(
        [[token_id[tok] for tok in s.events] for s in sequences]
    )

    def count(patterns: list[tuple[str, ...]]) -> list[int]:
        encoded = [[token_id[tok] for tok in p] for p in patterns]
        return kernels.count_subsequences(packed, encoded)

    candidates = [(tok,) for tok in vocab]
    frequent: dict[tuple[str, ...], int] = {}
    level = {}
    for pattern, c in zip(candidates, count(candidates)):
        if c >= threshold:
            level[pattern] = c
    frequent.update(level)

    length = 2
    while level and length <= max_len:
        prev = sorted(level)
        joined = [
            p + (q[-1],) for p in prev for q in prev if p[1:] == q[: len(q) - 1]
        ]
        pruned = [
            cand
            for cand in joined
            if all(
                cand[:i] + cand[i + 1 :] in level for i in range(len(cand))
            )
        ]
        next_level = {}
        if pruned:
            for pattern, c in zip(pruned, count(pruned)):
                if c >= threshold:
                    next_level[pattern] = c
        frequent.update(next_level)
        level = next_level
        length += 1

    return [
        SequencePattern(elements=p, support=c / m)
        for p, c in sorted(frequent.items(), key=lambda e: (len(e[0]), e[0]))
    ]
