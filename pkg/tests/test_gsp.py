import random
from datetime import datetime, timedelta

import pytest

from engage_miner.errors import InvalidThresholdError, OracleSizeError
from engage_miner.etl import EventRecord
from engage_miner.gsp import EventSequence, SequencePattern, build_sequences, gsp_mine
from engage_miner.oracles import brute_force_sequences


def _rec(sid, minute, etype="Login"):
    t = datetime(2024, 1, 10, 9, 0) + timedelta(minutes=minute)
    return EventRecord(t, etype, "/course", None, None, sid)


def _seqs(*event_lists):
    return [
        EventSequence(f"s{i}", tuple(events)) for i, events in enumerate(event_lists)
    ]


def random_sequences(rng, max_alphabet=6, max_sequences=15, max_len=6):
    alphabet = [chr(ord("A") + i) for i in range(rng.randint(1, max_alphabet))]
    n = rng.randint(1, max_sequences)
    return _seqs(
        *[
            [rng.choice(alphabet) for _ in range(rng.randint(1, max_len))]
            for _ in range(n)
        ]
    )


class TestBuildSequences:
    def test_interleaved_students_sorted(self):
        records = [
            _rec("s2", 5, "ContentRead"),
            _rec("s1", 9, "ForumRead"),
            _rec("s1", 1, "Login"),
            _rec("s2", 2, "Login"),
        ]
        got = build_sequences(records)
        assert got == [
            EventSequence("s1", ("Login", "ForumRead")),
            EventSequence("s2", ("Login", "ContentRead")),
        ]

    def test_stable_on_timestamp_ties(self):
        records = [_rec("s1", 0, "Login"), _rec("s1", 0, "ContentRead")]
        assert build_sequences(records)[0].events == ("Login", "ContentRead")

    def test_single_record(self):
        assert build_sequences([_rec("s1", 0)]) == [EventSequence("s1", ("Login",))]

    def test_empty(self):
        assert build_sequences([]) == []


class TestGspMine:
    def test_worked_example(self):
        sequences = _seqs(["a", "b"], ["a", "b"], ["b", "a"])
        got = gsp_mine(sequences, 2 / 3)
        assert got == [
            SequencePattern(("a",), 1.0),
            SequencePattern(("b",), 1.0),
            SequencePattern(("a", "b"), 2 / 3),
        ]

    def test_repeated_token_pattern(self):
        sequences = _seqs(["a", "a"], ["a", "a"], ["a"])
        got = {p.elements: p.support for p in gsp_mine(sequences, 0.5)}
        assert got[("a", "a")] == 2 / 3

    def test_length_one_sequences_only_singletons(self):
        sequences = _seqs(["a"], ["b"], ["a"])
        got = gsp_mine(sequences, 1 / 3)
        assert all(len(p.elements) == 1 for p in got)

    def test_empty_input(self):
        assert gsp_mine([], 0.5) == []

    def test_invalid_threshold(self):
        with pytest.raises(InvalidThresholdError):
            gsp_mine(_seqs(["a"]), 0.0)

    def test_max_len_cap(self):
        sequences = _seqs(["a", "b", "c"]) * 1
        got = gsp_mine(sequences, 1.0, max_len=2)
        assert max(len(p.elements) for p in got) == 2

    def test_matches_oracle_on_random_instances(self):
        rng = random.Random(11)
        for _ in range(60):
            sequences = random_sequences(rng)
            min_support = rng.choice([0.2, 1 / 3, 0.5, 0.75])
            max_len = rng.randint(1, 4)
            got = gsp_mine(sequences, min_support, max_len=max_len)
            assert got == brute_force_sequences(sequences, min_support, max_len)

    def test_apriori_property_over_sequences(self):
        rng = random.Random(23)
        for _ in range(30):
            sequences = random_sequences(rng)
            got = {p.elements for p in gsp_mine(sequences, 0.4, max_len=4)}
            for pattern in got:
                for i in range(len(pattern)):
                    sub = pattern[:i] + pattern[i + 1 :]
                    if sub:
                        assert sub in got


class TestSequenceOracleGuards:
    def test_alphabet_guard(self):
        sequences = _seqs([chr(ord("A") + i) for i in range(7)])
        with pytest.raises(OracleSizeError):
            brute_force_sequences(sequences, 0.5, 2)

    def test_sequence_count_guard(self):
        sequences = _seqs(*[["a"]] * 16)
        with pytest.raises(OracleSizeError):
            brute_force_sequences(sequences, 0.5, 2)

    def test_max_len_guard(self):
        with pytest.raises(OracleSizeError):
            brute_force_sequences(_seqs(["a"]), 0.5, 5)

    def test_empty_is_empty(self):
        assert brute_force_sequences([], 0.5, 2) == []

    def test_max_len_one_is_token_frequency(self):
        sequences = _seqs(["a", "b"], ["a"])
        got = brute_force_sequences(sequences, 0.4, 1)
        assert got == [
            SequencePattern(("a",), 1.0),
            SequencePattern(("b",), 0.5),
        ]
