"""Rule-report assembly and rendering (text, json, csv).

The json form is the canonical on-disk artifact: schema-stable key order,
machine-diffable, and loadable back into a RuleReport for re-rendering.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, fields
from typing import Sequence

from .config import MiningConfig
from .encoding import ENGAGEMENT_LEVELS
from .etl import FEATURE_FIELDS, StudentFeatureVector
from .itemsets import AssociationRule, Item, Itemset, RuleMetrics

FORMATS = ("text", "json", "csv")


@dataclass
class RuleReport:
    rules: list[tuple[AssociationRule, RuleMetrics]]
    config: MiningConfig
    level_grade_summary: dict[str, float | None]  # keys exactly L, M, H
    record_count: int
    dataset_hash: str

    def __post_init__(self):
        ordered = {}
        for level in ENGAGEMENT_LEVELS:
            ordered[level] = self.level_grade_summary.get(level)
        self.level_grade_summary = ordered


def dataset_fingerprint(vectors: Sequence[StudentFeatureVector]) -> tuple[int, str]:
    """Record count plus a sha256 over the canonical serialized rows."""
    digest = hashlib.sha256()
    for v in vectors:
        row = ",".join("" if (x := getattr(v, f)) is None else str(x) for f in FEATURE_FIELDS)
        digest.update(row.encode("utf-8"))
        digest.update(b"\n")
    return len(vectors), digest.hexdigest()


def emit_report(report: RuleReport, fmt: str) -> bytes:
    if fmt == "text":
        return _emit_text(report)
    if fmt == "json":
        return _emit_json(report)
    if fmt == "csv":
        return _emit_csv(report)
    raise ValueError(f"unknown report format {fmt!r}; choices: {FORMATS}")


def _emit_text(report: RuleReport) -> bytes:
    cfg = report.config
    lines = [
        "engagement -> performance association rules",
        f"config: min_support={cfg.min_support} min_confidence={cfg.min_confidence} "
        f"min_lift={cfg.min_lift} algorithm={cfg.algorithm} "
        f"grade_bucketing={cfg.grade_bucketing} max_rule_len={cfg.max_rule_len}",
        f"dataset: {report.record_count} records, sha256 {report.dataset_hash[:16]}",
        "",
    ]
    for rule, met in report.rules:
        lines.append(
            f"{rule.antecedent} => {rule.consequent}  "
            f"supp={met.support:.3f} conf={met.confidence:.3f} lift={met.lift:.3f}"
        )
    lines.append(f"{len(report.rules)} rules")
    lines.append("")
    lines.append("average course grade by engagement level:")
    for level in ENGAGEMENT_LEVELS:
        mean = report.level_grade_summary[level]
        lines.append(f"  {level}  {'-' if mean is None else f'{mean:.1f}'}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def _items_to_json(itemset: Itemset) -> list[dict]:
    return [{"attribute": it.attribute, "value": it.value} for it in itemset]


def _items_from_json(payload: list[dict]) -> Itemset:
    return Itemset(Item(entry["attribute"], entry["value"]) for entry in payload)


def _emit_json(report: RuleReport) -> bytes:
    doc = {
        "config": {f.name: getattr(report.config, f.name) for f in fields(MiningConfig)},
        "dataset": {"records": report.record_count, "sha256": report.dataset_hash},
        "rules": [
            {
                "antecedent": _items_to_json(rule.antecedent),
                "consequent": _items_to_json(rule.consequent),
                "support": met.support,
                "confidence": met.confidence,
                "lift": met.lift,
            }
            for rule, met in report.rules
        ],
        "level_grade_summary": report.level_grade_summary,
    }
    # Compact separators: stable key order keeps it diffable, and the C
    # encoder keeps large rule lists fast.
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


def _emit_csv(report: RuleReport) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["antecedent", "consequent", "support", "confidence", "lift"])
    for rule, met in report.rules:
        writer.writerow(
            [
                str(rule.antecedent),
                str(rule.consequent),
                repr(met.support),
                repr(met.confidence),
                repr(met.lift),
            ]
        )
    return buf.getvalue().encode("utf-8")


def report_from_json(payload: bytes) -> RuleReport:
    doc = json.loads(payload.decode("utf-8"))
    rules = [
        (
            AssociationRule(
                _items_from_json(entry["antecedent"]),
                _items_from_json(entry["consequent"]),
            ),
            RuleMetrics(entry["support"], entry["confidence"], entry["lift"]),
        )
        for entry in doc["rules"]
    ]
    return RuleReport(
        rules=rules,
        config=MiningConfig(**doc["config"]),
        level_grade_summary=doc["level_grade_summary"],
        record_count=doc["dataset"]["records"],
        dataset_hash=doc["dataset"]["sha256"],
    )
