"""Deterministic synthetic cohorts with a planted engagement-grade link.

The generator exists to plant verifiable structure, not to simulate real
students: the default per-level activity ranges are disjoint (so the three
levels form well-separated clusters), and grade coupling is controlled by
``implication_strength`` -- at 1.0 every grade is drawn from the student's
level model and clipped into that level's band, at 0.0 every grade comes
from a level-independent baseline, and values in between mix the two per
grade cell.

Randomness comes from numpy's PCG64, a fixed published generator, so a
given seed reproduces the same bytes on any platform.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Mapping

import numpy as np

from .etl import ASSIGNMENT_SUBMIT_TYPES, EVENTS_HEADER, GRADE_FIELDS, GRADES_HEADER

TRUTH_HEADER = ["student_id", "true_level"]

_LOCATIONS = {
    "Login": "/course",
    "ContentRead": "/course/content",
    "ForumRead": "/course/forum",
    "ForumPost": "/course/forum",
    "QuizReview": "/course/quiz",
    "AssignmentSubmit1": "/course/assignments/1",
    "AssignmentSubmit2": "/course/assignments/2",
    "AssignmentSubmit3": "/course/assignments/3",
}
_COUNT_EVENT_TYPES = ("Login", "ContentRead", "ForumRead", "ForumPost", "QuizReview")


@dataclass(frozen=True)
class GradeSpec:
    """Normal draw clipped into [lo, hi]."""

    mean: float
    sigma: float
    lo: float = 0.0
    hi: float = 100.0

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 100.0):
            raise ValueError(f"grade band [{self.lo}, {self.hi}] invalid")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class LevelProfile:
    """Per-level activity: count ranges (inclusive) and submission delay hours."""

    counts: Mapping[str, tuple[int, int]]
    submit_delay_h: tuple[float, float]

    def __post_init__(self):
        for name, (lo, hi) in self.counts.items():
            if lo < 0 or hi < lo:
                raise ValueError(f"count range for {name} invalid: ({lo}, {hi})")
        lo, hi = self.submit_delay_h
        if lo < 0 or hi < lo:
            raise ValueError(f"delay range invalid: ({lo}, {hi})")


def _default_activity() -> dict[str, LevelProfile]:
    return {
        "L": LevelProfile(
            counts={
                "Login": (0, 8),
                "ContentRead": (0, 10),
                "ForumRead": (0, 3),
                "ForumPost": (0, 1),
                "QuizReview": (0, 1),
            },
            submit_delay_h=(300.0, 500.0),
        ),
        "M": LevelProfile(
            counts={
                "Login": (15, 25),
                "ContentRead": (25, 45),
                "ForumRead": (8, 15),
                "ForumPost": (2, 4),
                "QuizReview": (2, 4),
            },
            submit_delay_h=(100.0, 200.0),
        ),
        "H": LevelProfile(
            counts={
                "Login": (40, 60),
                "ContentRead": (60, 100),
                "ForumRead": (25, 40),
                "ForumPost": (6, 10),
                "QuizReview": (6, 10),
            },
            submit_delay_h=(5.0, 60.0),
        ),
    }


def _default_grade_model() -> dict[str, dict[str, GradeSpec]]:
    bands = {"L": GradeSpec(55, 8, 30, 69), "M": GradeSpec(77, 5, 70, 89),
             "H": GradeSpec(95, 3, 90, 100)}
    return {level: {g: spec for g in GRADE_FIELDS} for level, spec in bands.items()}


def _default_baseline() -> dict[str, GradeSpec]:
    return {g: GradeSpec(75, 12, 0, 100) for g in GRADE_FIELDS}


@dataclass(frozen=True)
class CohortSpec:
    n_students: int
    seed: int
    level_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)  # L, M, H
    activity_ranges: Mapping[str, LevelProfile] = field(default_factory=_default_activity)
    grade_model: Mapping[str, Mapping[str, GradeSpec]] = field(
        default_factory=_default_grade_model
    )
    baseline_grades: Mapping[str, GradeSpec] = field(default_factory=_default_baseline)
    implication_strength: float = 1.0
    course_start: datetime = datetime(2024, 1, 8, 0, 0, 0)
    course_weeks: int = 12
    assignment_post_days: tuple[int, int, int] = (7, 35, 63)

    def __post_init__(self):
        if self.n_students < 0:
            raise ValueError("n_students must be nonnegative")
        if abs(sum(self.level_mix) - 1.0) > 1e-9:
            raise ValueError(f"level_mix must sum to 1, got {self.level_mix}")
        if any(f < 0 for f in self.level_mix):
            raise ValueError("level_mix fractions must be nonnegative")
        if not 0.0 <= self.implication_strength <= 1.0:
            raise ValueError("implication_strength must be in [0, 1]")
        for level in ("L", "M", "H"):
            if level not in self.activity_ranges:
                raise ValueError(f"activity_ranges missing level {level}")
            if level not in self.grade_model:
                raise ValueError(f"grade_model missing level {level}")

    def assignment_post_times(self) -> tuple[datetime, datetime, datetime]:
        t = self.course_start
        d1, d2, d3 = self.assignment_post_days
        return (t + timedelta(days=d1), t + timedelta(days=d2), t + timedelta(days=d3))


@dataclass(frozen=True)
class CohortData:
    events_csv: bytes
    grades_csv: bytes
    truth_csv: bytes
    course_config_toml: bytes
    true_levels: dict[str, str]


def default_cohort_spec(
    n_students: int,
    seed: int,
    implication_strength: float = 1.0,
    level_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3),
) -> CohortSpec:
    return CohortSpec(
        n_students=n_students,
        seed=seed,
        level_mix=level_mix,
        implication_strength=implication_strength,
    )


def generate_cohort(spec: CohortSpec) -> CohortData:
    """Deterministic event log, grades, ground truth and course config."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    post_times = spec.assignment_post_times()
    course_hours = spec.course_weeks * 7 * 24

    ids = [f"s{i:04d}" for i in range(spec.n_students)]
    cut_lm = spec.level_mix[0]
    cut_mh = spec.level_mix[0] + spec.level_mix[1]
    true_levels: dict[str, str] = {}
    event_rows: list[tuple[str, str, str, str, str, str]] = []
    grade_rows: list[list[str]] = []

    for sid in ids:
        u = rng.random()
        level = "L" if u < cut_lm else ("M" if u < cut_mh else "H")
        true_levels[sid] = level
        profile = spec.activity_ranges[level]

        for etype in _COUNT_EVENT_TYPES:
            lo, hi = profile.counts[etype]
            for _ in range(int(rng.integers(lo, hi + 1))):
                offset_s = int(round(rng.uniform(0, course_hours) * 3600))
                event_rows.append(_event_row(etype, spec.course_start, offset_s, sid))
        for n, submit_type in enumerate(ASSIGNMENT_SUBMIT_TYPES, start=1):
            delay_h = rng.uniform(*profile.submit_delay_h)
            offset_s = int(
                round(
                    (post_times[n - 1] - spec.course_start).total_seconds()
                    + delay_h * 3600
                )
            )
            event_rows.append(_event_row(submit_type, spec.course_start, offset_s, sid))

        scores = []
        for gfield in GRADE_FIELDS:
            if rng.random() < spec.implication_strength:
                gspec = spec.grade_model[level][gfield]
            else:
                gspec = spec.baseline_grades[gfield]
            value = float(np.clip(rng.normal(gspec.mean, gspec.sigma), gspec.lo, gspec.hi))
            scores.append(f"{value:.1f}")
        grade_rows.append([sid] + scores)

    event_rows.sort()  # chronological, then by the remaining fields

    events_csv = _csv_bytes(EVENTS_HEADER, event_rows)
    grades_csv = _csv_bytes(GRADES_HEADER, grade_rows)
    truth_csv = _csv_bytes(TRUTH_HEADER, [[sid, true_levels[sid]] for sid in ids])
    toml = (
        "# assignment posting times (ISO-8601)\n"
        "[assignments]\n"
        f'posted1 = "{post_times[0].isoformat()}"\n'
        f'posted2 = "{post_times[1].isoformat()}"\n'
        f'posted3 = "{post_times[2].isoformat()}"\n'
    ).encode("utf-8")
    return CohortData(events_csv, grades_csv, truth_csv, toml, true_levels)


def _event_row(
    etype: str, course_start: datetime, offset_s: int, sid: str
) -> tuple[str, str, str, str, str, str]:
    when = course_start + timedelta(seconds=offset_s)
    return (
        when.isoformat(),
        etype,
        _LOCATIONS[etype],
        (when - timedelta(minutes=30)).isoformat(),
        (when + timedelta(minutes=30)).isoformat(),
        sid,
    )


def _csv_bytes(header: list[str], rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")
