"""Mining thresholds and algorithm selection, shared by the miners and CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidThresholdError

ALGORITHMS = ("apriori", "fpgrowth")
BUCKETING_MODES = ("exact-10s", "banded")


@dataclass(frozen=True)
class MiningConfig:
    """Thresholds and knobs for one mining run.

    The lift filter is strict (lift > min_lift): at the default of 1.0 only
    rules whose sides are positively associated survive, since lift 1 means
    the sides are empirically independent.
    """

    min_support: float = 0.1
    min_confidence: float = 0.9
    min_lift: float = 1.0
    algorithm: str = "apriori"
    grade_bucketing: str = "banded"
    max_rule_len: int = 4

    def __post_init__(self):
        if not 0.0 < self.min_support <= 1.0:
            raise InvalidThresholdError(
                f"min_support must be in (0, 1], got {self.min_support}"
            )
        if not 0.0 <= self.min_confidence <= 1.0:
            raise InvalidThresholdError(
                f"min_confidence must be in [0, 1], got {self.min_confidence}"
            )
        if self.min_lift < 0.0:
            raise InvalidThresholdError(f"min_lift must be >= 0, got {self.min_lift}")
        if self.algorithm not in ALGORITHMS:
            raise InvalidThresholdError(
                f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}"
            )
        if self.grade_bucketing not in BUCKETING_MODES:
            raise InvalidThresholdError(
                f"grade_bucketing must be one of {BUCKETING_MODES}, "
                f"got {self.grade_bucketing!r}"
            )
        if self.max_rule_len < 2:
            raise InvalidThresholdError(
                f"max_rule_len must be >= 2, got {self.max_rule_len}"
            )
