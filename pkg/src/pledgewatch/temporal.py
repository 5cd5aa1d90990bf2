"""Rule-based normalization of temporal expressions into calendar dates.

Event extraction emits date expressions in many shapes: absolute dates,
written forms ("04-Jul-2024"), coarse periods ("Autumn 2023"), and
relative phrases that only make sense against an anchor such as the
source document's publication date ("two days ago", "Last month
(relative to 01-Jul-2024)"). Everything resolves to a calendar date plus
a precision marker so coarse dates stay honest when sorted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, timedelta

from .errors import MissingAnchorError, NormalizationError

PRECISION_DAY = "day"
PRECISION_MONTH = "month"
PRECISION_SEASON = "season"
PRECISION_YEAR = "year"

_MONTHS = {
    "january": 1, "jan": 1,
    "february": 2, "feb": 2,
    "march": 3, "mar": 3,
    "april": 4, "apr": 4,
    "may": 5,
    "june": 6, "jun": 6,
    "july": 7, "jul": 7,
    "august": 8, "aug": 8,
    "september": 9, "sep": 9, "sept": 9,
    "october": 10, "oct": 10,
    "november": 11, "nov": 11,
    "december": 12, "dec": 12,
}

# Northern-hemisphere convention; a season resolves to its start month.
_SEASONS = {
    "spring": 3,
    "summer": 6,
    "autumn": 9,
    "fall": 9,
    "winter": 12,
}

_NUMBER_WORDS = {
    "a": 1, "an": 1, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
    "twenty": 20,
}

_MONTH_RE = "|".join(sorted(_MONTHS, key=len, reverse=True))
_SEASON_RE = "|".join(_SEASONS)

_ISO = re.compile(r"^(\d{4})[-/](\d{1,2})[-/](\d{1,2})$")
_NUMERIC_DMY = re.compile(r"^(\d{1,2})[-/.](\d{1,2})[-/.](\d{4})$")
_TWO_DIGIT_YEAR = re.compile(r"^\d{1,2}[-/.]\d{1,2}[-/.]\d{2}$")
_WRITTEN_DMY = re.compile(
    rf"^(\d{{1,2}})(?:st|nd|rd|th)?(?:\s+of)?[\s\-]+({_MONTH_RE})[\s\-,]+(\d{{4}})$",
    re.IGNORECASE,
)
_WRITTEN_MDY = re.compile(
    rf"^({_MONTH_RE})[\s\-]+(\d{{1,2}})(?:st|nd|rd|th)?,?\s+(\d{{4}})$",
    re.IGNORECASE,
)
_MONTH_YEAR = re.compile(rf"^({_MONTH_RE}),?\s+(\d{{4}})$", re.IGNORECASE)
_SEASON_YEAR = re.compile(rf"^({_SEASON_RE})\s+(\d{{4}})$", re.IGNORECASE)
_BARE_YEAR = re.compile(r"^(\d{4})$")
_RELATIVE_TO = re.compile(r"\s*\(relative\s+to\s+([^)]+)\)\s*$", re.IGNORECASE)
_N_UNITS_AGO = re.compile(
    r"^(\d+|" + "|".join(_NUMBER_WORDS) + r")\s+(day|week|month|year)s?\s+ago$",
    re.IGNORECASE,
)
_BETWEEN = re.compile(r"^between\s+(.+?)\s+and\s+(.+)$", re.IGNORECASE)


@dataclass(frozen=True)
class NormalizedDate:
    """A resolved calendar date with its precision and the original text."""

    date: date
    precision: str
    source_expression: str

    def __post_init__(self):
        if self.precision not in (PRECISION_DAY, PRECISION_MONTH, PRECISION_SEASON, PRECISION_YEAR):
            raise ValueError(f"unknown precision {self.precision!r}")
        if self.precision == PRECISION_MONTH and self.date.day != 1:
            raise ValueError("month precision requires day 01")
        if self.precision == PRECISION_YEAR and (self.date.month != 1 or self.date.day != 1):
            raise ValueError("year precision requires January 01")
        if self.precision == PRECISION_SEASON and (
            self.date.day != 1 or self.date.month not in _SEASONS.values()
        ):
            raise ValueError("season precision requires day 01 of a season start month")

    def iso(self) -> str:
        return self.date.isoformat()


@dataclass(frozen=True)
class TemporalAnchor:
    """Reference date for resolving relative expressions."""

    anchor_date: date


def _make_date(year: int, month: int, day: int, expression: str) -> date:
    try:
        return date(year, month, day)
    except ValueError as exc:
        raise NormalizationError(expression, str(exc)) from exc


def _add_months(d: date, n: int) -> date:
    """Shift by whole months, clamping the day to the target month's length."""
    total = d.year * 12 + (d.month - 1) + n
    year, month = divmod(total, 12)
    month += 1
    for day in (d.day, 30, 29, 28):
        try:
            return date(year, month, day)
        except ValueError:
            continue
    raise ValueError(f"month arithmetic failed for {d} + {n} months")  # pragma: no cover


def _anchor_date(anchor: TemporalAnchor | date | None) -> date | None:
    if anchor is None:
        return None
    if isinstance(anchor, TemporalAnchor):
        return anchor.anchor_date
    return anchor


def normalize_timestamp(
    expression: str, anchor: TemporalAnchor | date | None = None
) -> NormalizedDate:
    """Resolve a temporal expression to a :class:`NormalizedDate`.

    Resolution precedence: ISO and day-first numeric dates, written
    day-month-year forms, month-year, season-year, bare year, then
    relative phrases which require ``anchor``. An embedded
    "(relative to <date>)" suffix overrides the passed anchor.
    Two-digit years are rejected rather than guessed.

    Raises :class:`NormalizationError` for unresolvable expressions and
    :class:`MissingAnchorError` for relative phrases with no anchor.
    """
    if not expression or not expression.strip():
        raise NormalizationError(expression, "empty expression")
    text = " ".join(expression.strip().split())

    suffix = _RELATIVE_TO.search(text)
    if suffix:
        anchor_nd = normalize_timestamp(suffix.group(1).strip())
        anchor = anchor_nd.date
        text = _RELATIVE_TO.sub("", text).strip()
        if not text:
            raise NormalizationError(expression, "nothing before the anchor suffix")

    if _TWO_DIGIT_YEAR.match(text):
        raise NormalizationError(expression, "two-digit years are not accepted")

    between = _BETWEEN.match(text)
    if between:
        return _resolve_range_start(between.group(1), between.group(2), expression, anchor)

    m = _ISO.match(text)
    if m:
        d = _make_date(int(m.group(1)), int(m.group(2)), int(m.group(3)), expression)
        return NormalizedDate(d, PRECISION_DAY, expression)

    m = _NUMERIC_DMY.match(text)
    if m:
        # Day-first reading (UK convention).
        d = _make_date(int(m.group(3)), int(m.group(2)), int(m.group(1)), expression)
        return NormalizedDate(d, PRECISION_DAY, expression)

    m = _WRITTEN_DMY.match(text)
    if m:
        month = _MONTHS[m.group(2).lower()]
        d = _make_date(int(m.group(3)), month, int(m.group(1)), expression)
        return NormalizedDate(d, PRECISION_DAY, expression)

    m = _WRITTEN_MDY.match(text)
    if m:
        month = _MONTHS[m.group(1).lower()]
        d = _make_date(int(m.group(3)), month, int(m.group(2)), expression)
        return NormalizedDate(d, PRECISION_DAY, expression)

    m = _MONTH_YEAR.match(text)
    if m:
        month = _MONTHS[m.group(1).lower()]
        d = _make_date(int(m.group(2)), month, 1, expression)
        return NormalizedDate(d, PRECISION_MONTH, expression)

    m = _SEASON_YEAR.match(text)
    if m:
        month = _SEASONS[m.group(1).lower()]
        d = _make_date(int(m.group(2)), month, 1, expression)
        return NormalizedDate(d, PRECISION_SEASON, expression)

    m = _BARE_YEAR.match(text)
    if m:
        d = _make_date(int(m.group(1)), 1, 1, expression)
        return NormalizedDate(d, PRECISION_YEAR, expression)

    return _resolve_relative(text, expression, _anchor_date(anchor))


def _resolve_range_start(
    start_text: str, end_text: str, expression: str, anchor: TemporalAnchor | date | None
) -> NormalizedDate:
    """Heuristic: a date range resolves to its start.

    A bare month on the start side borrows the end side's year
    ("between July and September 2024" reads as July 2024).
    """
    start_text = start_text.strip()
    end_text = end_text.strip()
    if start_text.lower() in _MONTHS or start_text.lower() in _SEASONS:
        year = re.search(r"(\d{4})", end_text)
        if year:
            start_text = f"{start_text} {year.group(1)}"
    resolved = normalize_timestamp(start_text, anchor)
    return NormalizedDate(resolved.date, resolved.precision, expression)


def _resolve_relative(text: str, expression: str, anchor: date | None) -> NormalizedDate:
    lowered = text.lower()
    relative_forms = (
        "today", "now", "yesterday", "tomorrow",
        "last week", "next week", "this week",
        "last month", "next month", "this month",
        "last year", "next year", "this year",
    )
    n_units = _N_UNITS_AGO.match(lowered)
    if lowered not in relative_forms and not n_units:
        raise NormalizationError(expression)
    if anchor is None:
        raise MissingAnchorError(expression)

    if lowered in ("today", "now"):
        return NormalizedDate(anchor, PRECISION_DAY, expression)
    if lowered == "yesterday":
        return NormalizedDate(anchor - timedelta(days=1), PRECISION_DAY, expression)
    if lowered == "tomorrow":
        return NormalizedDate(anchor + timedelta(days=1), PRECISION_DAY, expression)
    if lowered == "last week":
        return NormalizedDate(anchor - timedelta(days=7), PRECISION_DAY, expression)
    if lowered == "next week":
        return NormalizedDate(anchor + timedelta(days=7), PRECISION_DAY, expression)
    if lowered == "this week":
        return NormalizedDate(anchor, PRECISION_DAY, expression)
    if lowered in ("last month", "next month", "this month"):
        shift = {"last month": -1, "next month": 1, "this month": 0}[lowered]
        shifted = _add_months(anchor.replace(day=1), shift)
        return NormalizedDate(shifted, PRECISION_MONTH, expression)
    if lowered in ("last year", "next year", "this year"):
        shift = {"last year": -1, "next year": 1, "this year": 0}[lowered]
        return NormalizedDate(date(anchor.year + shift, 1, 1), PRECISION_YEAR, expression)

    count_text, unit = n_units.group(1), n_units.group(2).lower()
    count = int(count_text) if count_text.isdigit() else _NUMBER_WORDS[count_text.lower()]
    if unit == "day":
        resolved = anchor - timedelta(days=count)
    elif unit == "week":
        resolved = anchor - timedelta(days=7 * count)
    elif unit == "month":
        resolved = _add_months(anchor, -count)
    else:
        resolved = _add_months(anchor, -12 * count)
    return NormalizedDate(resolved, PRECISION_DAY, expression)


def compare_for_ordering(a: NormalizedDate, b: NormalizedDate) -> int:
    """Timeline comparator: by calendar date only; precision never breaks ties."""
    if a.date < b.date:
        return -1
    if a.date > b.date:
        return 1
    return 0
