"""Core task types: pledges, monitoring ranges, timelines, annotations.

All types are immutable values; the ordering and validation contracts
here are relied on by every downstream module.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date

from .errors import ValidationError
from .temporal import NormalizedDate

DECISION_USEFUL = "useful"
DECISION_NOT_USEFUL = "not_useful"

ORDER_CHRONOLOGICAL = "chronological"
ORDER_REVERSE = "reverse_chronological"


@dataclass(frozen=True)
class Pledge:
    """A political commitment: who made it, when, where, and what was promised."""

    speaker: str
    date_made: date
    geo_scope: str
    claim: str
    id: str

    def key(self) -> str:
        return self.id


@dataclass(frozen=True)
class MonitoringRange:
    """Date window within which fulfilment evidence is sought."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise ValidationError("range", f"start {self.start} is after end {self.end}")

    def overlaps(self, other: "MonitoringRange") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True)
class TimelineEvent:
    """One dated fulfilment event with its provenance and filter decision."""

    description: str
    timestamp: NormalizedDate
    source_url: str
    decision: str
    confidence: float

    def __post_init__(self):
        if not self.description.strip():
            raise ValidationError("description", "must be non-empty")
        if not _url_ok(self.source_url):
            raise ValidationError("source_url", f"malformed URL {self.source_url!r}")
        if self.decision not in (DECISION_USEFUL, DECISION_NOT_USEFUL):
            raise ValidationError("decision", f"unknown decision {self.decision!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError("confidence", f"{self.confidence} outside [0,1]")

    def triple(self) -> tuple[str, str, str]:
        return (self.description, self.timestamp.iso(), self.source_url)


@dataclass(frozen=True)
class Timeline:
    """Ordered fulfilment timeline for one pledge. May be empty."""

    pledge_id: str
    range: MonitoringRange
    events: tuple[TimelineEvent, ...]
    order: str = ORDER_REVERSE

    def __post_init__(self):
        if self.order not in (ORDER_CHRONOLOGICAL, ORDER_REVERSE):
            raise ValidationError("order", f"unknown order {self.order!r}")
        seen = set()
        for event in self.events:
            if event.triple() in seen:
                raise ValidationError("events", f"duplicate event triple {event.triple()}")
            seen.add(event.triple())
        for a, b in zip(self.events, self.events[1:]):
            if self.order == ORDER_CHRONOLOGICAL and a.timestamp.date > b.timestamp.date:
                raise ValidationError("events", "events out of chronological order")
            if self.order == ORDER_REVERSE and a.timestamp.date < b.timestamp.date:
                raise ValidationError("events", "events out of reverse-chronological order")

    def to_json_dict(self) -> dict:
        return {
            "pledge_id": self.pledge_id,
            "range": {"start": self.range.start.isoformat(), "end": self.range.end.isoformat()},
            "order": self.order,
            "events": [
                {
                    "description": e.description,
                    "timestamp": e.timestamp.iso(),
                    "source_url": e.source_url,
                    "decision": e.decision,
                    "confidence": e.confidence,
                }
                for e in self.events
            ],
        }


@dataclass(frozen=True)
class AnnotatedInstance:
    """One labelled (pledge, event, timestamp, URL) row for ICL and evaluation."""

    pledge: Pledge
    event: str
    timestamp: NormalizedDate
    source_url: str
    label: str

    def __post_init__(self):
        if self.label not in (DECISION_USEFUL, DECISION_NOT_USEFUL):
            raise ValidationError("label", f"label must be useful/not_useful, got {self.label!r}")


def _url_ok(url: str) -> bool:
    return url.startswith(("http://", "https://")) and len(url) > 8


def derive_pledge_id(speaker: str, date_made: date, claim: str) -> str:
    """Stable opaque id so the same pledge resolves to the same record."""
    digest = hashlib.sha1(f"{speaker}\x00{date_made.isoformat()}\x00{claim}".encode()).hexdigest()
    return f"p{digest[:12]}"


def validate_pledge(
    speaker: str,
    date_made: str | date,
    geo_scope: str,
    claim: str,
    pledge_id: str | None = None,
) -> Pledge:
    """Build a validated :class:`Pledge`, trimming whitespace from text fields.

    Raises :class:`ValidationError` naming the offending field for an
    empty claim or an unparseable date.
    """
    speaker = (speaker or "").strip()
    geo_scope = (geo_scope or "").strip()
    claim = (claim or "").strip()
    if not claim:
        raise ValidationError("claim", "must be non-empty")
    if not speaker:
        raise ValidationError("speaker", "must be non-empty")
    if isinstance(date_made, date):
        parsed = date_made
    else:
        try:
            parsed = date.fromisoformat(str(date_made).strip())
        except ValueError as exc:
            raise ValidationError("date_made", f"invalid date {date_made!r}") from exc
    pid = (pledge_id or "").strip() or derive_pledge_id(speaker, parsed, claim)
    return Pledge(speaker=speaker, date_made=parsed, geo_scope=geo_scope, claim=claim, id=pid)


def sort_timeline(
    events: list[TimelineEvent], order: str = ORDER_CHRONOLOGICAL
) -> list[TimelineEvent]:
    """Sort events by timestamp under ``order``.

    Ties always break by (source_url, description) ascending so repeated
    runs produce identical output regardless of input order.
    """
    if order not in (ORDER_CHRONOLOGICAL, ORDER_REVERSE):
        raise ValidationError("order", f"unknown order {order!r}")
    reverse = order == ORDER_REVERSE
    day_sign = -1 if reverse else 1
    return sorted(
        events,
        key=lambda e: (day_sign * e.timestamp.date.toordinal(), e.source_url, e.description),
    )
