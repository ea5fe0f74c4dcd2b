"""Command-line pipeline: synth -> etl -> cluster -> mine -> report.

Each subcommand reads its declared inputs and writes its declared outputs
under --out-dir, so the whole pipeline threads through one directory:

  engage-miner synth   --n 500 --seed 7 --out-dir run/
  engage-miner etl     --out-dir run/
  engage-miner cluster --out-dir run/
  engage-miner mine    --out-dir run/ --min-support 0.1 --min-confidence 0.9
  engage-miner report  --out-dir run/ --format csv

`sequences` additionally mines order-preserving event patterns from the
raw event log -- a sequential extension beyond the flat per-student table
the association rules are mined from.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import clustering, encoding, etl, gsp, synth
from .apriori import mine_rules
from .config import ALGORITHMS, BUCKETING_MODES, MiningConfig
from .errors import EngageMinerError, ParseError
from .report import (
    FORMATS,
    RuleReport,
    dataset_fingerprint,
    emit_report,
    report_from_json,
)

SEQUENCES_NOTE = (
    "note: sequential patterns are mined from the raw event log, an "
    "extension beyond the flat per-student record table"
)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (EngageMinerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engage-miner",
        description="Mine engagement -> performance association rules from LMS data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic cohort")
    p.add_argument("--n", type=int, default=500, help="number of students")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--implication-strength", type=float, default=1.0)
    p.add_argument("--level-mix", type=_mix, default=(1 / 3, 1 / 3, 1 / 3),
                   help="L,M,H fractions summing to 1")
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("etl", help="parse inputs and compute raw engagement metrics")
    p.add_argument("--events", type=Path, default=None)
    p.add_argument("--grades", type=Path, default=None)
    p.add_argument("--course-config", type=Path, default=None)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(handler=_cmd_etl)

    p = sub.add_parser("cluster", help="assign L/M/H engagement levels (k-means)")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_cluster)

    p = sub.add_parser("mine", help="mine association rules and write the report")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--grades", type=Path, default=None)
    p.add_argument("--min-support", type=float, default=0.1)
    p.add_argument("--min-confidence", type=float, default=0.9)
    p.add_argument("--min-lift", type=float, default=1.0)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="apriori")
    p.add_argument("--grade-bucketing", choices=BUCKETING_MODES, default="banded")
    p.add_argument("--max-rule-len", type=int, default=4)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--keep-partial", action="store_true",
                   help="keep students present in only one input file")
    p.set_defaults(handler=_cmd_mine)

    p = sub.add_parser("report", help="re-render an existing report.json")
    p.add_argument("--out-dir", type=Path, default=None)
    p.add_argument("--report", type=Path, default=None)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("sequences", help="mine sequential event patterns (GSP)")
    p.add_argument("--events", type=Path, default=None)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--min-support", type=float, default=0.1)
    p.add_argument("--max-len", type=int, default=gsp.DEFAULT_MAX_LEN)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_cmd_sequences)

    return parser


def _mix(raw: str) -> tuple[float, float, float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("level mix needs three comma-separated fractions")
    try:
        mix = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level mix {raw!r}") from None
    return mix  # validated by CohortSpec


def _default(path: Path | None, out_dir: Path, name: str) -> Path:
    return path if path is not None else out_dir / name


def _cmd_synth(args) -> int:
    spec = synth.default_cohort_spec(
        args.n, args.seed, args.implication_strength, args.level_mix
    )
    data = synth.generate_cohort(spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    (args.out_dir / "events.csv").write_bytes(data.events_csv)
    (args.out_dir / "grades.csv").write_bytes(data.grades_csv)
    (args.out_dir / "truth.csv").write_bytes(data.truth_csv)
    (args.out_dir / "course.toml").write_bytes(data.course_config_toml)
    print(f"wrote {args.n}-student cohort (seed {args.seed}) to {args.out_dir}")
    return 0


def _cmd_etl(args) -> int:
    events_path = _default(args.events, args.out_dir, "events.csv")
    grades_path = _default(args.grades, args.out_dir, "grades.csv")
    config_path = _default(args.course_config, args.out_dir, "course.toml")
    with open(events_path, newline="", encoding="utf-8") as fh:
        events = etl.parse_event_log(fh)
    with open(grades_path, newline="", encoding="utf-8") as fh:
        grades = etl.parse_grades(fh)
    course = etl.load_course_config(str(config_path))

    groups = etl.group_events_by_student(events)
    metrics = {
        sid: etl.compute_engagement_metrics(recs, course.assignment_post_times)
        for sid, recs in groups.items()
    }
    args.out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.out_dir / "engagement_raw.csv", "w", newline="", encoding="utf-8") as fh:
        etl.write_raw_metrics_csv(metrics, fh)

    grade_ids = {g.student_id for g in grades}
    mismatches = sorted(set(metrics) ^ grade_ids)
    with open(args.out_dir / "reconciliation.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["student_id", "issue"])
        for sid in mismatches:
            writer.writerow(
                [sid, "missing-grades" if sid in metrics else "missing-events"]
            )
    print(
        f"computed metrics for {len(metrics)} students "
        f"({len(mismatches)} reconciliation entries)"
    )
    return 0


def _cmd_cluster(args) -> int:
    with open(args.out_dir / "engagement_raw.csv", newline="", encoding="utf-8") as fh:
        metrics = etl.read_raw_metrics_csv(fh)
    levels, result, matrix = clustering.assign_levels(metrics, seed=args.seed)

    with open(args.out_dir / "levels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["student_id", "level"])
        for sid in sorted(levels):
            writer.writerow([sid, levels[sid]])
    summary = {
        "seed": args.seed,
        "n_students": len(levels),
        "n_iterations": result.n_iter,
        "inertia": result.inertia,
        "inertia_history": result.inertia_history,
        "centroids_normalized": result.centroids.tolist(),
        "scaling_min_max": matrix.scaling,
        "level_counts": {
            lvl: sum(1 for v in levels.values() if v == lvl) for lvl in clustering.LEVELS
        },
    }
    (args.out_dir / "clusters.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    print(f"clustered {len(levels)} students: {summary['level_counts']}")
    return 0


def _read_levels(path: Path) -> dict[str, str]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["student_id", "level"]:
            raise ParseError(f"unexpected levels header {header}", row=1)
        return {row[0]: row[1] for row in reader if row}


def _cmd_mine(args) -> int:
    grades_path = _default(args.grades, args.out_dir, "grades.csv")
    with open(args.out_dir / "engagement_raw.csv", newline="", encoding="utf-8") as fh:
        metrics = etl.read_raw_metrics_csv(fh)
    levels = _read_levels(args.out_dir / "levels.csv")
    with open(grades_path, newline="", encoding="utf-8") as fh:
        grades = etl.parse_grades(fh)

    cfg = MiningConfig(
        min_support=args.min_support,
        min_confidence=args.min_confidence,
        min_lift=args.min_lift,
        algorithm=args.algorithm,
        grade_bucketing=args.grade_bucketing,
        max_rule_len=args.max_rule_len,
    )
    vectors, reconciliation = etl.assemble_dataset(
        metrics, levels, grades, keep_partial=args.keep_partial
    )
    with open(args.out_dir / "features.csv", "w", newline="", encoding="utf-8") as fh:
        etl.write_features_csv(vectors, fh)
    with open(args.out_dir / "reconciliation.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["student_id", "issue"])
        for entry in reconciliation:
            writer.writerow([entry.student_id, entry.issue])

    db = encoding.encode_feature_vectors(vectors, cfg.grade_bucketing)
    rules = mine_rules(db, cfg)

    grades_by_id = {g.student_id: g for g in grades}
    summary: dict[str, float | None] = {}
    for level in clustering.LEVELS:
        scores = [
            grades_by_id[sid].course_grade
            for sid, lvl in levels.items()
            if lvl == level and sid in grades_by_id
        ]
        summary[level] = sum(scores) / len(scores) if scores else None

    count, digest = dataset_fingerprint(vectors)
    rule_report = RuleReport(
        rules=rules,
        config=cfg,
        level_grade_summary=summary,
        record_count=count,
        dataset_hash=digest,
    )
    (args.out_dir / "report.json").write_bytes(emit_report(rule_report, "json"))
    sys.stdout.write(emit_report(rule_report, args.format).decode("utf-8"))
    return 0


def _cmd_report(args) -> int:
    path = args.report
    if path is None:
        if args.out_dir is None:
            raise ParseError("report: need --report or --out-dir")
        path = args.out_dir / "report.json"
    rendered = emit_report(report_from_json(path.read_bytes()), args.format)
    if args.out is not None:
        args.out.write_bytes(rendered)
    else:
        sys.stdout.write(rendered.decode("utf-8"))
    return 0


def _cmd_sequences(args) -> int:
    events_path = _default(args.events, args.out_dir, "events.csv")
    with open(events_path, newline="", encoding="utf-8") as fh:
        events = etl.parse_event_log(fh)
    sequences = gsp.build_sequences(events)
    patterns = gsp.gsp_mine(sequences, args.min_support, max_len=args.max_len)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        doc = {
            "note": SEQUENCES_NOTE,
            "min_support": args.min_support,
            "max_len": args.max_len,
            "patterns": [
                {"elements": list(p.elements), "support": p.support} for p in patterns
            ],
        }
        (args.out_dir / "patterns.json").write_text(
            json.dumps(doc, indent=2) + "\n", encoding="utf-8"
        )
    else:
        with open(args.out_dir / "patterns.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["pattern", "support"])
            for p in patterns:
                writer.writerow([" -> ".join(p.elements), repr(p.support)])
    print(SEQUENCES_NOTE)
    print(f"{len(patterns)} frequent sequential patterns from {len(sequences)} students")
    for p in patterns:
        print(f"  {' -> '.join(p.elements)}  supp={p.support:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
