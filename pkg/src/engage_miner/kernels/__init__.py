"""Counting-kernel backend selection.

The hot loops of the miners -- bitset subset counting for itemset support
and forward scans for subsequence support -- live behind a two-backend
interface: a compiled Cython extension and a pure-Python fallback with
identical semantics. The compiled backend is preferred when its extension
imported successfully.

Environment:
  ENGAGE_MINER_KERNEL   force a backend ("python" or "cython")
  ENGAGE_MINER_THREADS  worker cap for partitioned counting (compiled
                        backend only; partial integer counts are summed)
"""

from __future__ import annotations

import os

from . import _pykernels

_backends = {"python": _pykernels}
try:
    from . import _cwrap

    _backends["cython"] = _cwrap
except ImportError:
    _cwrap = None

_forced = os.environ.get("ENGAGE_MINER_KERNEL", "").strip().lower()
if _forced:
    if _forced not in _backends:
        raise ImportError(
            f"ENGAGE_MINER_KERNEL={_forced!r} is not available; "
            f"choices: {sorted(_backends)}"
        )
    _active = _backends[_forced]
else:
    _active = _backends.get("cython", _pykernels)

BACKEND = _active.NAME

pack_masks = _active.pack_masks
count_subsets = _active.count_subsets
pack_sequences = _active.pack_sequences
count_subsequences = _active.count_subsequences


def available_backends() -> dict:
    """Name -> backend module, for parity tests and benchmarks."""
    return dict(_backends)
