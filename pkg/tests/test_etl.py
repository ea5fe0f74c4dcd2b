import io
from dataclasses import fields
from datetime import datetime, timedelta

import pytest

from engage_miner.errors import DataError, ParseError
from engage_miner.etl import (
    EVENTS_HEADER,
    FEATURE_FIELDS,
    GRADES_HEADER,
    EngagementMetrics,
    EventRecord,
    GradeRecord,
    StudentFeatureVector,
    assemble_dataset,
    compute_engagement_metrics,
    discretize,
    discretize_metrics,
    load_course_config,
    parse_event_log,
    parse_grades,
    read_raw_metrics_csv,
    write_features_csv,
    write_raw_metrics_csv,
)

EVENTS_HEAD = ",".join(EVENTS_HEADER)
GRADES_HEAD = ",".join(GRADES_HEADER)
POSTED = (
    datetime(2024, 1, 15),
    datetime(2024, 2, 12),
    datetime(2024, 3, 11),
)


def _events(*rows):
    return io.StringIO("\n".join([EVENTS_HEAD, *rows]) + "\n")


def _grades(*rows):
    return io.StringIO("\n".join([GRADES_HEAD, *rows]) + "\n")


def _metrics(**overrides):
    base = dict(
        num_logins=3,
        num_content_reads=0,
        num_forum_reads=0,
        num_forum_posts=0,
        num_quiz_reviews=0,
        assign1_dur_h=27.0,
        assign2_dur_h=None,
        assign3_dur_h=None,
        avg_assign_dur_h=27.0,
    )
    base.update(overrides)
    return EngagementMetrics(**base)


class TestParseEventLog:
    def test_valid_row(self):
        got = parse_event_log(
            _events(
                "2024-01-10T09:00:00,Login,/course,2024-01-10T08:59:00,"
                "2024-01-10T09:30:00,s001"
            )
        )
        assert got == [
            EventRecord(
                datetime(2024, 1, 10, 9),
                "Login",
                "/course",
                datetime(2024, 1, 10, 8, 59),
                datetime(2024, 1, 10, 9, 30),
                "s001",
            )
        ]

    def test_five_fields_cites_row(self):
        with pytest.raises(ParseError, match="row 2"):
            parse_event_log(_events("2024-01-10T09:00:00,Login,/course,x,s001"))

    def test_header_only(self):
        assert parse_event_log(_events()) == []

    def test_bad_timestamp(self):
        with pytest.raises(ParseError, match="timestamp"):
            parse_event_log(_events("nope,Login,/course,,,s001"))

    def test_unknown_column(self):
        with pytest.raises(ParseError, match="row 1"):
            parse_event_log(io.StringIO("foo,bar\n"))

    def test_unknown_event_type(self):
        with pytest.raises(ParseError, match="event type"):
            parse_event_log(_events("2024-01-10T09:00:00,Dance,/course,,,s001"))

    def test_event_outside_session_window(self):
        with pytest.raises(ParseError, match="session"):
            parse_event_log(
                _events(
                    "2024-01-10T09:00:00,Login,/course,2024-01-10T09:10:00,"
                    "2024-01-10T09:30:00,s001"
                )
            )


class TestParseGrades:
    def test_valid_row(self):
        got = parse_grades(_grades("s001,80,90,70,85,75,88,82"))
        assert got == [GradeRecord("s001", 80, 90, 70, 85, 75, 88, 82)]

    def test_duplicate_id(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_grades(
                _grades("s001,80,90,70,85,75,88,82", "s001,1,2,3,4,5,6,7")
            )

    def test_range_error(self):
        with pytest.raises(ParseError, match=r"outside \[0, 100\]"):
            parse_grades(_grades("s001,80,90,70,85,75,88,105"))
        with pytest.raises(ParseError, match=r"outside \[0, 100\]"):
            parse_grades(_grades("s001,-5,90,70,85,75,88,82"))


class TestCourseConfig:
    def test_load(self, tmp_path):
        path = tmp_path / "course.toml"
        path.write_text(
            '[assignments]\nposted1 = "2024-01-15T00:00:00"\n'
            'posted2 = "2024-02-12T00:00:00"\nposted3 = "2024-03-11T00:00:00"\n'
        )
        cfg = load_course_config(str(path))
        assert cfg.assignment_post_times == POSTED

    def test_missing_key(self):
        with pytest.raises(DataError, match="missing"):
            load_course_config(b'[assignments]\nposted1 = "2024-01-15T00:00:00"\n')


class TestComputeMetrics:
    def test_counts_events(self):
        events = [
            EventRecord(datetime(2024, 1, 10 + i, 9), "Login", "/c", None, None, "s1")
            for i in range(3)
        ]
        met = compute_engagement_metrics(events, POSTED)
        assert met.num_logins == 3
        assert met.num_forum_reads == met.num_forum_posts == 0
        assert met.assign1_dur_h is None and met.avg_assign_dur_h is None

    def test_submission_duration(self):
        submit = EventRecord(
            POSTED[0] + timedelta(hours=27), "AssignmentSubmit1", "/c", None, None, "s1"
        )
        met = compute_engagement_metrics([submit], POSTED)
        assert met.assign1_dur_h == 27.0
        assert met.avg_assign_dur_h == 27.0

    def test_last_submission_wins(self):
        events = [
            EventRecord(POSTED[0] + timedelta(hours=h), "AssignmentSubmit1", "/c",
                        None, None, "s1")
            for h in (5, 40, 12)
        ]
        met = compute_engagement_metrics(events, POSTED)
        assert met.assign1_dur_h == 40.0

    def test_average_uses_present_durations_only(self):
        events = [
            EventRecord(POSTED[0] + timedelta(hours=10), "AssignmentSubmit1", "/c",
                        None, None, "s1"),
            EventRecord(POSTED[2] + timedelta(hours=30), "AssignmentSubmit3", "/c",
                        None, None, "s1"),
        ]
        met = compute_engagement_metrics(events, POSTED)
        assert met.assign2_dur_h is None
        assert met.avg_assign_dur_h == 20.0

    def test_submission_before_posting_is_data_error(self):
        early = EventRecord(
            POSTED[0] - timedelta(hours=1), "AssignmentSubmit1", "/c", None, None, "s1"
        )
        with pytest.raises(DataError, match="before"):
            compute_engagement_metrics([early], POSTED)


class TestDiscretize:
    @pytest.mark.parametrize(
        "raw,expected",
        [(27, 30), (0, 0), (25, 30), (24.999, 20), (5, 10), (4.9, 0), (650, 650)],
    )
    def test_examples(self, raw, expected):
        assert discretize(raw) == expected

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            discretize(-1)

    def test_properties(self):
        for i in range(0, 1200):
            raw = i * 0.73
            d = discretize(raw)
            assert d % 10 == 0
            assert abs(raw - d) <= 5

    def test_metrics_discretization_keeps_absent(self):
        disc = discretize_metrics(_metrics())
        assert disc.num_logins == 0  # 3 rounds down
        assert disc.assign1_dur_h == 30
        assert disc.assign2_dur_h is None
        assert disc.avg_assign_dur_h == 30


class TestAssemble:
    GRADES = [
        GradeRecord("s001", 80, 90, 70, 85, 75, 88, 82),
        GradeRecord("s002", 60, 55, 70, 65, 75, 58, 62),
    ]

    def test_two_matched_students(self):
        metrics = {"s001": _metrics(), "s002": _metrics(num_logins=14)}
        levels = {"s001": "H", "s002": "L"}
        vectors, recon = assemble_dataset(metrics, levels, self.GRADES)
        assert recon == []
        assert [v.student_id for v in vectors] == ["s001", "s002"]
        assert vectors[0].engagement_level == "H"
        assert vectors[0].course_grade == 80
        assert vectors[1].num_logins == 10

    def test_vector_has_exactly_18_fields(self):
        assert len(fields(StudentFeatureVector)) == 18
        assert len(FEATURE_FIELDS) == 18

    def test_grade_only_student_reconciled_and_excluded(self):
        vectors, recon = assemble_dataset({}, {}, self.GRADES[:1])
        assert vectors == []
        assert [(e.student_id, e.issue) for e in recon] == [("s001", "missing-events")]

    def test_event_only_student_reconciled(self):
        metrics = {"s003": _metrics()}
        vectors, recon = assemble_dataset(metrics, {"s003": "M"}, [])
        assert vectors == []
        assert [(e.student_id, e.issue) for e in recon] == [("s003", "missing-grades")]

    def test_keep_partial_keeps_both_sides(self):
        metrics = {"s003": _metrics()}
        vectors, recon = assemble_dataset(
            metrics, {"s003": "M"}, self.GRADES[:1], keep_partial=True
        )
        assert {v.student_id for v in vectors} == {"s001", "s003"}
        by_id = {v.student_id: v for v in vectors}
        assert by_id["s001"].num_logins is None
        assert by_id["s003"].course_grade is None
        assert len(recon) == 2

    def test_missing_level_is_error(self):
        with pytest.raises(DataError, match="no engagement level"):
            assemble_dataset({"s001": _metrics()}, {}, self.GRADES[:1])


class TestRoundTrips:
    def test_raw_metrics_csv_roundtrip(self):
        metrics = {"s001": _metrics(), "s002": _metrics(assign2_dur_h=3.25)}
        buf = io.StringIO()
        write_raw_metrics_csv(metrics, buf)
        buf.seek(0)
        assert read_raw_metrics_csv(buf) == metrics

    def test_features_csv_deterministic(self):
        metrics = {"s001": _metrics()}
        vectors, _ = assemble_dataset(metrics, {"s001": "M"}, self.GRADES[:1])
        a, b = io.StringIO(), io.StringIO()
        write_features_csv(vectors, a)
        write_features_csv(vectors, b)
        assert a.getvalue() == b.getvalue()
        header = a.getvalue().splitlines()[0].split(",")
        assert len(header) == 18

    GRADES = TestAssemble.GRADES
