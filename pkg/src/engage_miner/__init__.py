"""Frequent-pattern mining engine with an LMS engagement analytics pipeline.

Core: exact support/confidence/lift over encoded transaction databases,
mined level-wise (Apriori), by pattern growth (FP-Growth) as an
independently implemented fast path, and sequentially (GSP) over raw event
logs. Around the core: an ETL stage that turns an LMS event log and a
grade table into the 18-field per-student engagement dataset, k-means
L/M/H engagement levels, a deterministic synthetic-cohort generator with
brute-force oracles, and a CLI emitting rule reports.
"""

from .apriori import (
    FrequentItemsetTable,
    candidate_join,
    frequent_itemsets_apriori,
    mine_rules,
)
from .config import MiningConfig
from .etl import (
    EngagementMetrics,
    EventRecord,
    GradeRecord,
    StudentFeatureVector,
    assemble_dataset,
    compute_engagement_metrics,
    discretize,
    parse_event_log,
    parse_grades,
)
from .fpgrowth import FPTree, build_fp_tree, fp_growth
from .gsp import EventSequence, SequencePattern, build_sequences, gsp_mine
from .itemsets import (
    AssociationRule,
    Item,
    Itemset,
    RuleMetrics,
    TransactionDb,
    confidence,
    lift,
    rule_metrics,
    rules_from_itemset,
    support,
)
from .synth import CohortSpec, default_cohort_spec, generate_cohort

__version__ = "0.1.0"

__all__ = [
    "AssociationRule",
    "CohortSpec",
    "EngagementMetrics",
    "EventRecord",
    "EventSequence",
    "FPTree",
    "FrequentItemsetTable",
    "GradeRecord",
    "Item",
    "Itemset",
    "MiningConfig",
    "RuleMetrics",
    "SequencePattern",
    "StudentFeatureVector",
    "TransactionDb",
    "assemble_dataset",
    "build_fp_tree",
    "build_sequences",
    "candidate_join",
    "compute_engagement_metrics",
    "confidence",
    "default_cohort_spec",
    "discretize",
    "fp_growth",
    "frequent_itemsets_apriori",
    "generate_cohort",
    "gsp_mine",
    "lift",
    "mine_rules",
    "parse_event_log",
    "parse_grades",
    "rule_metrics",
    "rules_from_itemset",
    "support",
]
