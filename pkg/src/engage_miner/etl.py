"""Event-log and grade parsing, engagement metrics, and dataset assembly.

The pipeline input is two delimited files: an LMS event log (6 fields per
record) and a grade table (8 fields per record). From the per-student
event subsets we compute five frequency metrics and four submission-delay
metrics, round everything to the nearest ten (half-up), and join with the
discretized grades and the clustered engagement level into one 18-field
vector per student.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, fields
from datetime import datetime
from typing import Iterable, Mapping, Sequence, TextIO

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import DataError, ParseError

EVENTS_HEADER = [
    "event_date",
    "event_type",
    "event_location",
    "session_start",
    "session_end",
    "student_id",
]
GRADES_HEADER = [
    "student_id",
    "assignment1",
    "assignment2",
    "assignment3",
    "quiz1",
    "midterm",
    "final_exam",
    "course_grade",
]
GRADE_FIELDS = tuple(GRADES_HEADER[1:])

# Declared event vocabulary; the original LMS's is unpublished, so the
# synthetic generator emits exactly these tokens.
ASSIGNMENT_SUBMIT_TYPES = ("AssignmentSubmit1", "AssignmentSubmit2", "AssignmentSubmit3")
COUNTED_EVENT_TYPES = ("Login", "ContentRead", "ForumRead", "ForumPost", "QuizReview")
EVENT_TYPES = frozenset(COUNTED_EVENT_TYPES) | frozenset(ASSIGNMENT_SUBMIT_TYPES)

METRIC_FIELDS = (
    "num_logins",
    "num_content_reads",
    "num_forum_reads",
    "num_forum_posts",
    "num_quiz_reviews",
    "assign1_dur_h",
    "assign2_dur_h",
    "assign3_dur_h",
    "avg_assign_dur_h",
)
_COUNT_FOR_EVENT = dict(zip(COUNTED_EVENT_TYPES, METRIC_FIELDS))


@dataclass(frozen=True)
class EventRecord:
    event_date: datetime
    event_type: str
    event_location: str
    session_start: datetime | None
    session_end: datetime | None
    student_id: str


@dataclass(frozen=True)
class GradeRecord:
    student_id: str
    assignment1: float
    assignment2: float
    assignment3: float
    quiz1: float
    midterm: float
    final_exam: float
    course_grade: float

    def score(self, field: str) -> float:
        return getattr(self, field)


@dataclass(frozen=True)
class EngagementMetrics:
    """The nine per-student engagement metrics.

    Raw instances carry exact counts and fractional hours; discretized
    instances (see :func:`discretize_metrics`) hold multiples of ten.
    Submission-delay fields are None when the student never submitted.
    """

    num_logins: int
    num_content_reads: int
    num_forum_reads: int
    num_forum_posts: int
    num_quiz_reviews: int
    assign1_dur_h: float | None
    assign2_dur_h: float | None
    assign3_dur_h: float | None
    avg_assign_dur_h: float | None


@dataclass(frozen=True)
class StudentFeatureVector:
    """The 18-field merged record: id, nine metrics, level, seven grades."""

    student_id: str
    num_logins: int | None
    num_content_reads: int | None
    num_forum_reads: int | None
    num_forum_posts: int | None
    num_quiz_reviews: int | None
    assign1_dur_h: int | None
    assign2_dur_h: int | None
    assign3_dur_h: int | None
    avg_assign_dur_h: int | None
    engagement_level: str | None
    assignment1: int | None
    assignment2: int | None
    assignment3: int | None
    quiz1: int | None
    midterm: int | None
    final_exam: int | None
    course_grade: int | None


FEATURE_FIELDS = tuple(f.name for f in fields(StudentFeatureVector))


@dataclass(frozen=True)
class ReconciliationEntry:
    student_id: str
    issue: str  # "missing-events" or "missing-grades"


@dataclass(frozen=True)
class CourseConfig:
    """Assignment posting times; the event log itself does not carry them."""

    assignment_post_times: tuple[datetime, datetime, datetime]


def load_course_config(source: str | bytes) -> CourseConfig:
    """Parse the course TOML: [assignments] posted1/posted2/posted3."""
    if isinstance(source, str):
        with open(source, "rb") as fh:
            doc = tomllib.load(fh)
    else:
        doc = tomllib.loads(source.decode("utf-8"))
    try:
        section = doc["assignments"]
        raw = [section["posted1"], section["posted2"], section["posted3"]]
    except KeyError as exc:
        raise DataError(f"course config missing key: {exc}") from exc
    times = []
    for value in raw:
        if isinstance(value, datetime):
            times.append(value)
        else:
            try:
                times.append(datetime.fromisoformat(str(value)))
            except ValueError as exc:
                raise DataError(f"bad posting timestamp {value!r}") from exc
    return CourseConfig(assignment_post_times=(times[0], times[1], times[2]))


def _check_header(row: list[str] | None, expected: list[str], what: str) -> None:
    if row is None:
        raise ParseError(f"{what}: missing header row", row=1)
    if row != expected:
        unknown = [c for c in row if c not in expected]
        if unknown:
            raise ParseError(f"{what}: unknown column(s) {unknown}", row=1)
        raise ParseError(
            f"{what}: header {row} does not match expected {expected}", row=1
        )


def _parse_ts(raw: str, row_num: int, field: str) -> datetime:
    try:
        return datetime.fromisoformat(raw)
    except ValueError:
        raise ParseError(f"unparseable timestamp {raw!r} in {field}", row=row_num) from None


def parse_event_log(source: TextIO) -> list[EventRecord]:
    """Parse events.csv rows into records; any bad row aborts with its number."""
    reader = csv.reader(source)
    _check_header(next(reader, None), EVENTS_HEADER, "event log")
    records: list[EventRecord] = []
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(EVENTS_HEADER):
            raise ParseError(
                f"expected {len(EVENTS_HEADER)} fields, got {len(row)}", row=row_num
            )
        date_s, etype, location, start_s, end_s, sid = row
        if not sid:
            raise ParseError("missing student_id", row=row_num)
        if etype not in EVENT_TYPES:
            raise ParseError(f"unknown event type {etype!r}", row=row_num)
        event_date = _parse_ts(date_s, row_num, "event_date")
        session_start = _parse_ts(start_s, row_num, "session_start") if start_s else None
        session_end = _parse_ts(end_s, row_num, "session_end") if end_s else None
        if session_start is not None and session_end is not None:
            if not (session_start <= event_date <= session_end):
                raise ParseError(
                    "event_date outside its session window", row=row_num
                )
        records.append(
            EventRecord(event_date, etype, location, session_start, session_end, sid)
        )
    return records


def parse_grades(source: TextIO) -> list[GradeRecord]:
    """Parse grades.csv; scores must be within [0, 100], student ids unique."""
    reader = csv.reader(source)
    _check_header(next(reader, None), GRADES_HEADER, "grades")
    records: list[GradeRecord] = []
    seen: set[str] = set()
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(GRADES_HEADER):
            raise ParseError(
                f"expected {len(GRADES_HEADER)} fields, got {len(row)}", row=row_num
            )
        sid = row[0]
        if not sid:
            raise ParseError("missing student_id", row=row_num)
        if sid in seen:
            raise ParseError(f"duplicate student_id {sid!r}", row=row_num)
        seen.add(sid)
        scores = []
        for name, raw in zip(GRADE_FIELDS, row[1:]):
            try:
                value = float(raw)
            except ValueError:
                raise ParseError(f"unparseable score {raw!r} in {name}", row=row_num) from None
            if not 0.0 <= value <= 100.0:
                raise ParseError(
                    f"score {value} in {name} outside [0, 100]", row=row_num
                )
            scores.append(value)
        records.append(GradeRecord(sid, *scores))
    return records


def group_events_by_student(
    records: Iterable[EventRecord],
) -> dict[str, list[EventRecord]]:
    """Per-student event lists sorted by timestamp (stable on ties)."""
    ordered = sorted(records, key=lambda r: (r.student_id, r.event_date))
    groups: dict[str, list[EventRecord]] = {}
    for rec in ordered:
        groups.setdefault(rec.student_id, []).append(rec)
    return groups


def compute_engagement_metrics(
    events: Sequence[EventRecord],
    assignment_post_times: tuple[datetime, datetime, datetime],
) -> EngagementMetrics:
    """Raw (pre-discretization) metrics for one student's events.

    Counts tally the five counted event types. Each submission delay is the
    hours between posting and the student's last matching submission event;
    missing submissions stay absent, and the average covers only the
    delays that exist.
    """
    counts = dict.fromkeys(METRIC_FIELDS[:5], 0)
    last_submit: dict[int, datetime] = {}
    for rec in events:
        metric = _COUNT_FOR_EVENT.get(rec.event_type)
        if metric is not None:
            counts[metric] += 1
        elif rec.event_type in ASSIGNMENT_SUBMIT_TYPES:
            n = int(rec.event_type[-1])
            prev = last_submit.get(n)
            if prev is None or rec.event_date > prev:
                last_submit[n] = rec.event_date
    durations: list[float | None] = []
    for n in (1, 2, 3):
        submitted = last_submit.get(n)
        if submitted is None:
            durations.append(None)
            continue
        hours = (submitted - assignment_post_times[n - 1]).total_seconds() / 3600.0
        if hours < 0:
            sid = events[0].student_id if events else "?"
            raise DataError(
                f"student {sid}: assignment {n} submitted before it was posted"
            )
        durations.append(hours)
    present = [d for d in durations if d is not None]
    avg = sum(present) / len(present) if present else None
    return EngagementMetrics(
        **counts,
        assign1_dur_h=durations[0],
        assign2_dur_h=durations[1],
        assign3_dur_h=durations[2],
        avg_assign_dur_h=avg,
    )


def discretize(value: float) -> int:
    """Round a nonnegative value to the nearest multiple of ten, half-up."""
    if value < 0:
        raise ValueError(f"cannot discretize negative value {value}")
    return int(math.floor(value / 10.0 + 0.5)) * 10


def discretize_metrics(metrics: EngagementMetrics) -> EngagementMetrics:
    """All nine fields rounded to tens; absent delays stay absent."""

    def opt(v: float | None) -> int | None:
        return None if v is None else discretize(v)

    return EngagementMetrics(
        num_logins=discretize(metrics.num_logins),
        num_content_reads=discretize(metrics.num_content_reads),
        num_forum_reads=discretize(metrics.num_forum_reads),
        num_forum_posts=discretize(metrics.num_forum_posts),
        num_quiz_reviews=discretize(metrics.num_quiz_reviews),
        assign1_dur_h=opt(metrics.assign1_dur_h),
        assign2_dur_h=opt(metrics.assign2_dur_h),
        assign3_dur_h=opt(metrics.assign3_dur_h),
        avg_assign_dur_h=opt(metrics.avg_assign_dur_h),
    )


def assemble_dataset(
    metrics: Mapping[str, EngagementMetrics],
    levels: Mapping[str, str],
    grades: Sequence[GradeRecord],
    keep_partial: bool = False,
) -> tuple[list[StudentFeatureVector], list[ReconciliationEntry]]:
    """Join raw metrics, levels and raw grades into 18-field vectors.

    All numeric fields are discretized here. Students present on only one
    side are reported for reconciliation and excluded unless
    ``keep_partial`` is set, in which case the missing side's fields are
    None (and are simply omitted when the vector is encoded for mining).
    """
    grades_by_id = {g.student_id: g for g in grades}
    reconciliation: list[ReconciliationEntry] = []
    vectors: list[StudentFeatureVector] = []
    for sid in sorted(set(metrics) | set(grades_by_id)):
        met = metrics.get(sid)
        grade = grades_by_id.get(sid)
        if met is None or grade is None:
            issue = "missing-events" if met is None else "missing-grades"
            reconciliation.append(ReconciliationEntry(sid, issue))
            if not keep_partial:
                continue
        level = None
        if met is not None:
            if sid not in levels:
                raise DataError(f"student {sid} has metrics but no engagement level")
            level = levels[sid]
            disc = discretize_metrics(met)
        if met is None:
            metric_values = dict.fromkeys(METRIC_FIELDS)
        else:
            metric_values = {f: getattr(disc, f) for f in METRIC_FIELDS}
        if grade is None:
            grade_values = dict.fromkeys(GRADE_FIELDS)
        else:
            grade_values = {f: discretize(grade.score(f)) for f in GRADE_FIELDS}
        vectors.append(
            StudentFeatureVector(
                student_id=sid,
                engagement_level=level,
                **metric_values,
                **grade_values,
            )
        )
    return vectors, reconciliation


def write_features_csv(vectors: Sequence[StudentFeatureVector], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FEATURE_FIELDS)
    for v in vectors:
        writer.writerow(
            ["" if (x := getattr(v, f)) is None else x for f in FEATURE_FIELDS]
        )


def write_raw_metrics_csv(
    metrics: Mapping[str, EngagementMetrics], out: TextIO
) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("student_id",) + METRIC_FIELDS)
    for sid in sorted(metrics):
        met = metrics[sid]
        writer.writerow(
            [sid] + ["" if (x := getattr(met, f)) is None else repr(x) for f in METRIC_FIELDS]
        )


def read_raw_metrics_csv(source: TextIO) -> dict[str, EngagementMetrics]:
    reader = csv.reader(source)
    _check_header(next(reader, None), list(("student_id",) + METRIC_FIELDS), "raw metrics")
    out: dict[str, EngagementMetrics] = {}
    for row_num, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 1 + len(METRIC_FIELDS):
            raise ParseError("wrong field count", row=row_num)
        sid = row[0]
        if sid in out:
            raise ParseError(f"duplicate student_id {sid!r}", row=row_num)
        try:
            counts = [int(float(x)) for x in row[1:6]]
            delays = [None if x == "" else float(x) for x in row[6:]]
        except ValueError:
            raise ParseError("unparseable metric value", row=row_num) from None
        out[sid] = EngagementMetrics(*counts, *delays)
    return out
