import random
from datetime import date, timedelta

import pytest
from hypothesis import given, strategies as st

from pledgewatch.errors import MissingAnchorError, NormalizationError
from pledgewatch.temporal import (
    NormalizedDate,
    TemporalAnchor,
    compare_for_ordering,
    normalize_timestamp,
)


def test_season_worked_example():
    nd = normalize_timestamp("Autumn 2023")
    assert nd.date == date(2023, 9, 1)
    assert nd.precision == "season"


def test_relative_worked_example():
    nd = normalize_timestamp("two days ago", TemporalAnchor(date(2024, 7, 8)))
    assert nd.date == date(2024, 7, 6)
    assert nd.precision == "day"


def test_iso_identity():
    nd = normalize_timestamp("2024-07-04")
    assert nd.date == date(2024, 7, 4)
    assert nd.precision == "day"


def test_relative_to_suffix():
    nd = normalize_timestamp("Last month (relative to 01-Jul-2024)")
    assert nd.date == date(2024, 6, 1)
    assert nd.precision == "month"


GRAMMAR_CASES = [
    # ISO and numeric day-first forms
    ("2024-07-04", None, date(2024, 7, 4), "day"),
    ("2024/07/04", None, date(2024, 7, 4), "day"),
    ("2023-12-31", None, date(2023, 12, 31), "day"),
    ("08-07-2024", None, date(2024, 7, 8), "day"),
    ("31-01-2025", None, date(2025, 1, 31), "day"),
    ("01.02.2024", None, date(2024, 2, 1), "day"),
    # written day-month-year
    ("04-Jul-2024", None, date(2024, 7, 4), "day"),
    ("4 July 2024", None, date(2024, 7, 4), "day"),
    ("4th of July 2024", None, date(2024, 7, 4), "day"),
    ("21 august 2024", None, date(2024, 8, 21), "day"),
    ("1st September 2023", None, date(2023, 9, 1), "day"),
    ("July 4, 2024", None, date(2024, 7, 4), "day"),
    ("Jul 4 2024", None, date(2024, 7, 4), "day"),
    ("December 25, 2023", None, date(2023, 12, 25), "day"),
    # month-year
    ("July 2024", None, date(2024, 7, 1), "month"),
    ("Jul 2024", None, date(2024, 7, 1), "month"),
    ("september 2023", None, date(2023, 9, 1), "month"),
    ("Sept 2023", None, date(2023, 9, 1), "month"),
    ("January 2024", None, date(2024, 1, 1), "month"),
    ("February, 2024", None, date(2024, 2, 1), "month"),
    # season-year
    ("Autumn 2023", None, date(2023, 9, 1), "season"),
    ("Fall 2023", None, date(2023, 9, 1), "season"),
    ("spring 2024", None, date(2024, 3, 1), "season"),
    ("Summer 2024", None, date(2024, 6, 1), "season"),
    ("Winter 2024", None, date(2024, 12, 1), "season"),
    # bare year
    ("2024", None, date(2024, 1, 1), "year"),
    ("1999", None, date(1999, 1, 1), "year"),
    # relative, anchored at 2024-07-08
    ("today", date(2024, 7, 8), date(2024, 7, 8), "day"),
    ("yesterday", date(2024, 7, 8), date(2024, 7, 7), "day"),
    ("tomorrow", date(2024, 7, 8), date(2024, 7, 9), "day"),
    ("two days ago", date(2024, 7, 8), date(2024, 7, 6), "day"),
    ("10 days ago", date(2024, 7, 8), date(2024, 6, 28), "day"),
    ("a week ago", date(2024, 7, 8), date(2024, 7, 1), "day"),
    ("3 weeks ago", date(2024, 7, 8), date(2024, 6, 17), "day"),
    ("last week", date(2024, 7, 8), date(2024, 7, 1), "day"),
    ("next week", date(2024, 7, 8), date(2024, 7, 15), "day"),
    ("last month", date(2024, 7, 8), date(2024, 6, 1), "month"),
    ("next month", date(2024, 7, 8), date(2024, 8, 1), "month"),
    ("last year", date(2024, 7, 8), date(2023, 1, 1), "year"),
    ("one month ago", date(2024, 7, 8), date(2024, 6, 8), "day"),
    ("two years ago", date(2024, 7, 8), date(2022, 7, 8), "day"),
    # year boundaries
    ("last month", date(2024, 1, 15), date(2023, 12, 1), "month"),
    ("next month", date(2023, 12, 15), date(2024, 1, 1), "month"),
    ("5 days ago", date(2024, 1, 2), date(2023, 12, 28), "day"),
    ("two months ago", date(2024, 1, 31), date(2023, 11, 30), "day"),
    ("1 year ago", date(2024, 2, 29), date(2023, 2, 28), "day"),
    # anchor suffix and ranges
    ("Last month (relative to 01-Jan-2024)", None, date(2023, 12, 1), "month"),
    ("two days ago (relative to 2024-01-01)", None, date(2023, 12, 30), "day"),
    ("between July and September 2024", None, date(2024, 7, 1), "month"),
    ("between 2024-07-01 and 2024-09-30", None, date(2024, 7, 1), "day"),
]


@pytest.mark.parametrize("expression,anchor,expected,precision", GRAMMAR_CASES)
def test_grammar_suite(expression, anchor, expected, precision):
    nd = normalize_timestamp(expression, anchor)
    assert nd.date == expected
    assert nd.precision == precision
    assert nd.source_expression == expression


def test_grammar_suite_has_enough_cases():
    assert len(GRAMMAR_CASES) >= 40


@pytest.mark.parametrize(
    "expression",
    ["", "   ", "soon", "the near future", "07-08-24", "13-13-2024", "2024-02-30", "Midsummer 2024"],
)
def test_unresolvable_expressions(expression):
    with pytest.raises(NormalizationError):
        normalize_timestamp(expression, date(2024, 7, 8))


def test_relative_without_anchor_is_missing_anchor_error():
    with pytest.raises(MissingAnchorError):
        normalize_timestamp("two days ago")
    with pytest.raises(MissingAnchorError):
        normalize_timestamp("last month")


def test_two_digit_years_rejected_even_with_anchor():
    with pytest.raises(NormalizationError):
        normalize_timestamp("08-07-24", date(2024, 7, 8))


def test_n_days_ago_matches_epoch_arithmetic():
    anchor = date(2024, 7, 8)
    for n in range(0, 366):
        nd = normalize_timestamp(f"{n} days ago", anchor)
        assert nd.date.toordinal() == anchor.toordinal() - n
        assert nd.precision == "day"


@given(st.dates(min_value=date(1900, 1, 2), max_value=date(2100, 12, 31)))
def test_iso_round_trip(d):
    nd = normalize_timestamp(d.isoformat())
    assert nd.date == d
    assert nd.precision == "day"
    again = normalize_timestamp(nd.iso())
    assert again.date == nd.date and again.precision == "day"


def test_comparator_against_epoch_day_oracle():
    rng = random.Random(42)
    base = date(2020, 1, 1)
    for _ in range(100):
        a = base + timedelta(days=rng.randrange(0, 4000))
        b = base + timedelta(days=rng.randrange(0, 4000))
        nd_a = NormalizedDate(a, "day", a.isoformat())
        nd_b = NormalizedDate(b, "day", b.isoformat())
        diff = a.toordinal() - b.toordinal()
        expected = 0 if diff == 0 else (-1 if diff < 0 else 1)
        assert compare_for_ordering(nd_a, nd_b) == expected


def test_comparator_ignores_precision():
    a = NormalizedDate(date(2024, 6, 1), "month", "June 2024")
    b = NormalizedDate(date(2024, 6, 15), "day", "2024-06-15")
    assert compare_for_ordering(a, b) == -1
    c = NormalizedDate(date(2024, 6, 1), "day", "2024-06-01")
    assert compare_for_ordering(a, c) == 0


def test_precision_invariants_enforced():
    with pytest.raises(ValueError):
        NormalizedDate(date(2024, 6, 15), "month", "June 2024")
    with pytest.raises(ValueError):
        NormalizedDate(date(2024, 2, 1), "year", "2024")
    with pytest.raises(ValueError):
        NormalizedDate(date(2024, 5, 1), "season", "Spring 2024")
