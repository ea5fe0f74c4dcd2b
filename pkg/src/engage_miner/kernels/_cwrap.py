"""numpy packing and thread fan-out around the compiled kernels.

When ENGAGE_MINER_THREADS > 1, counting partitions the transaction (or
sequence) range across worker threads and sums the partial integer counts;
the kernels release the GIL, so the threads genuinely overlap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from . import _ckernels

NAME = "cython"

_WORD = 0xFFFFFFFFFFFFFFFF
_MIN_ROWS_PER_WORKER = 2048


def worker_count() -> int:
    raw = os.environ.get("ENGAGE_MINER_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _mask_words(mask: int, n_words: int) -> list[int]:
    return [(mask >> (64 * w)) & _WORD for w in range(n_words)]


def pack_masks(masks: Sequence[int], n_bits: int) -> np.ndarray:
    n_words = max(1, (n_bits + 63) // 64)
    arr = np.empty((len(masks), n_words), dtype=np.uint64)
    for i, mask in enumerate(masks):
        arr[i] = _mask_words(mask, n_words)
    return arr


def count_subsets(packed: np.ndarray, queries: Sequence[int], n_bits: int) -> list[int]:
    n_words = packed.shape[1]
    q = np.empty((len(queries), n_words), dtype=np.uint64)
    for i, mask in enumerate(queries):
        q[i] = _mask_words(mask, n_words)
    out = np.zeros(len(queries), dtype=np.int64)
    _partitioned(
        lambda part, lo, hi: _ckernels.count_subsets_words(packed, q, part, lo, hi),
        packed.shape[0],
        out,
    )
    return out.tolist()


def pack_sequences(sequences: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(sequences) + 1, dtype=np.int64)
    for i, seq in enumerate(sequences):
        offsets[i + 1] = offsets[i] + len(seq)
    flat = np.empty(int(offsets[-1]), dtype=np.int32)
    for i, seq in enumerate(sequences):
        flat[offsets[i] : offsets[i + 1]] = seq
    return flat, offsets


def count_subsequences(
    packed: tuple[np.ndarray, np.ndarray], patterns: Sequence[Sequence[int]]
) -> list[int]:
    flat, offsets = packed
    max_len = max((len(p) for p in patterns), default=0)
    pats = np.zeros((len(patterns), max(1, max_len)), dtype=np.int32)
    lens = np.zeros(len(patterns), dtype=np.int64)
    for i, p in enumerate(patterns):
        pats[i, : len(p)] = p
        lens[i] = len(p)
    out = np.zeros(len(patterns), dtype=np.int64)
    _partitioned(
        lambda part, lo, hi: _ckernels.count_subsequences_flat(
            flat, offsets, pats, lens, part, lo, hi
        ),
        len(offsets) - 1,
        out,
    )
    return out.tolist()


def _partitioned(run, n_rows: int, out: np.ndarray) -> None:
    workers = worker_count()
    if workers <= 1 or n_rows < workers * _MIN_ROWS_PER_WORKER:
        run(out, 0, n_rows)
        return
    bounds = np.linspace(0, n_rows, workers + 1, dtype=np.int64)
    partials = [np.zeros_like(out) for _ in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(run, partials[w], int(bounds[w]), int(bounds[w + 1]))
            for w in range(workers)
        ]
        for f in futures:
            f.result()
    for part in partials:
        out += part
