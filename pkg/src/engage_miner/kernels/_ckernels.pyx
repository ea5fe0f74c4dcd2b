# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled counting kernels.

Transactions are rows of 64-bit words (a fixed-width bitset); queries are
packed the same way. Both loops release the GIL so callers can partition
work across threads.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t


def count_subsets_words(const uint64_t[:, ::1] db,
                        const uint64_t[:, ::1] queries,
                        int64_t[::1] out,
                        Py_ssize_t row_start,
                        Py_ssize_t row_stop):
    """Accumulate, per query, the number of db rows whose bitset is a superset."""
    cdef Py_ssize_t n_words = db.shape[1]
    cdef Py_ssize_t n_queries = queries.shape[0]
    cdef Py_ssize_t q, i, w
    cdef int64_t cnt
    cdef bint ok
    with nogil:
        for q in range(n_queries):
            cnt = 0
            for i in range(row_start, row_stop):
                ok = True
                for w in range(n_words):
                    if (db[i, w] & queries[q, w]) != queries[q, w]:
                        ok = False
                        break
                if ok:
                    cnt += 1
            out[q] += cnt


def count_subsequences_flat(const int32_t[::1] flat,
                            const int64_t[::1] offsets,
                            const int32_t[:, ::1] patterns,
                            const int64_t[::1] pattern_lens,
                            int64_t[::1] out,
                            Py_ssize_t seq_start,
                            Py_ssize_t seq_stop):
    """Accumulate, per pattern, how many sequences contain it as a subsequence.

    Sequences are concatenated in ``flat``; sequence i spans
    ``flat[offsets[i]:offsets[i + 1]]``.
    """
    cdef Py_ssize_t n_patterns = patterns.shape[0]
    cdef Py_ssize_t p, i, t
    cdef int64_t j, plen, cnt
    with nogil:
        for p in range(n_patterns):
            plen = pattern_lens[p]
            cnt = 0
            for i in range(seq_start, seq_stop):
                if plen == 0:
                    cnt += 1
                    continue
                j = 0
                for t in range(offsets[i], offsets[i + 1]):
                    if flat[t] == patterns[p, j]:
                        j += 1
                        if j == plen:
                            cnt += 1
                            break
            out[p] += cnt
