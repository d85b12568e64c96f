"""Exception types shared across the package.

Validation errors carry enough context (record id, field) to produce
actionable diagnostics at the CLI/API boundary.
"""

from __future__ import annotations


class RiskError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInput(RiskError):
    """Input bytes/rows do not match the declared format."""

    def __init__(self, message: str, record_id: str | None = None, field: str | None = None):
        self.record_id = record_id
        self.field = field
        super().__init__(message)


class UnknownPhenomenonId(RiskError):
    """An id was referenced that does not exist in the catalog/graph/net."""

    def __init__(self, phenomenon_id: str, record_id: str | None = None, field: str | None = None):
        self.phenomenon_id = phenomenon_id
        self.record_id = record_id
        self.field = field
        where = f" in record {record_id!r}" if record_id else ""
        at = f" (field {field!r})" if field else ""
        super().__init__(f"unknown phenomenon id {phenomenon_id!r}{where}{at}")


class KindMismatch(RiskError):
    """An id was used in a position reserved for a different phenomenon kind."""

    def __init__(self, phenomenon_id: str, expected: str, actual: str,
                 record_id: str | None = None, field: str | None = None):
        self.phenomenon_id = phenomenon_id
        self.expected = expected
        self.actual = actual
        self.record_id = record_id
        self.field = field
        where = f" in record {record_id!r}" if record_id else ""
        at = f" (field {field!r})" if field else ""
        super().__init__(
            f"id {phenomenon_id!r} has kind {actual!r}, expected {expected!r}{where}{at}"
        )


class DuplicateRank(RiskError):
    """Two problem reports in one record claim the same rank."""

    def __init__(self, record_id: str, rank: int):
        self.record_id = record_id
        self.rank = rank
        super().__init__(f"duplicate rank {rank} in record {record_id!r}")


class RankOutOfRange(RiskError):
    """A rank outside 1..5."""

    def __init__(self, record_id: str, rank: int):
        self.record_id = record_id
        self.rank = rank
        super().__init__(f"rank {rank} out of range 1..5 in record {record_id!r}")


class EmptyDataset(RiskError):
    """Operation requires at least one record."""


class CycleDetected(RiskError):
    """The node graph contains a directed cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cycle detected: " + " -> ".join(cycle))


class UnknownNodeId(RiskError):
    """A query referenced a node id absent from the network."""

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node id {node_id!r}")


class InconsistentEvidence(RiskError):
    """The asserted evidence has probability zero under the network."""


class TooLarge(RiskError):
    """Joint enumeration refused: state space exceeds the configured cap."""


class InvalidInputs(RiskError):
    """Criticality inputs violate their invariants."""


class InvalidThresholds(RiskError):
    """Banding thresholds must satisfy 0 <= low_max < high_min."""
