import json
from datetime import date
from pathlib import Path

import pytest

from pledgewatch.domain import MonitoringRange, validate_pledge
from pledgewatch.providers.base import LlmResponse

REPO = Path(__file__).resolve().parents[1]
FIXTURE_WORLD = REPO / "fixtures" / "trailhunt"
GOLDEN = REPO / "tests" / "data" / "golden"
TEST_DATA = REPO / "tests" / "data"


@pytest.fixture
def trail_pledge():
    return validate_pledge("Labour", "2024-07-04", "UK", "We will ban trail hunting")


@pytest.fixture
def monitoring_range():
    return MonitoringRange(start=date(2024, 7, 5), end=date(2024, 9, 30))


@pytest.fixture
def fixture_world():
    return FIXTURE_WORLD


@pytest.fixture
def golden_dir():
    return GOLDEN


def load_golden(name: str):
    return json.loads((GOLDEN / name).read_text(encoding="utf-8"))


class StubLlm:
    """Scripted LLM: responds from a list, records every request."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        outcome = self.responses.pop(0) if self.responses else LlmResponse(text="")
        if isinstance(outcome, Exception):
            raise outcome
        if isinstance(outcome, str):
            return LlmResponse(text=outcome)
        return outcome
