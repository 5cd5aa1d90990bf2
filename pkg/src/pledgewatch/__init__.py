"""Pledge monitoring engine.

Given a political pledge and a monitoring date range, iteratively
retrieves web evidence, extracts dated events, and filters them into a
chronologically ordered fulfilment timeline.
"""

from .domain import (
    AnnotatedInstance,
    MonitoringRange,
    Pledge,
    Timeline,
    TimelineEvent,
    sort_timeline,
    validate_pledge,
)
from .temporal import NormalizedDate, TemporalAnchor, compare_for_ordering, normalize_timestamp

__version__ = "0.1.0"

__all__ = [
    "AnnotatedInstance",
    "MonitoringRange",
    "NormalizedDate",
    "Pledge",
    "TemporalAnchor",
    "Timeline",
    "TimelineEvent",
    "compare_for_ordering",
    "normalize_timestamp",
    "sort_timeline",
    "validate_pledge",
    "__version__",
]
