"""Exception types shared across the package."""


class EngageMinerError(Exception):
    """Base class for every error this package raises deliberately."""


class EmptyDatabaseError(EngageMinerError):
    """A metric or miner was invoked on a database with zero transactions."""


class UndeclaredAttributeError(EngageMinerError, KeyError):
    """An itemset mentions an attribute absent from the database universe."""


class ZeroSupportError(EngageMinerError, ZeroDivisionError):
    """Confidence or lift requested for a rule with a zero-support marginal."""


class TooSmallItemsetError(EngageMinerError, ValueError):
    """Rule expansion needs an itemset of at least two items."""


class MalformedLevelError(EngageMinerError, ValueError):
    """Candidate join was fed itemsets of mixed sizes or duplicates."""


class InvalidThresholdError(EngageMinerError, ValueError):
    """A mining threshold is outside its valid range."""


class DepthLimitError(EngageMinerError, RecursionError):
    """Pattern-growth recursion exceeded the safety cap."""


class InsufficientDataError(EngageMinerError, ValueError):
    """Fewer data rows than requested clusters."""


class LevelMappingError(EngageMinerError, ValueError):
    """Engagement-level labelling requires exactly three clusters."""


class OracleSizeError(EngageMinerError, ValueError):
    """A brute-force oracle refused an instance too large to enumerate."""


class ParseError(EngageMinerError, ValueError):
    """An input row failed to parse; carries the 1-based row number."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DataError(EngageMinerError, ValueError):
    """Parsed data is semantically impossible (e.g. submission before posting)."""
