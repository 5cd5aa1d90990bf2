"""Provider contracts: web search, page scraping, LLM completion, embeddings.

Everything the pipeline needs from the outside world goes through these
protocols, so the whole engine runs offline against fixture providers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from datetime import date
from typing import Callable, Protocol, Sequence

from ..domain import MonitoringRange
from ..errors import RateLimitError, TransportError


@dataclass(frozen=True)
class LlmRequest:
    system_instruction: str
    prompt: str
    temperature: float = 0.0
    nucleus_mass: float = 1.0
    max_output: int = 1024
    want_first_token_logprob: bool = False

    def __post_init__(self):
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.nucleus_mass <= 1:
            raise ValueError("nucleus_mass must be in (0, 1]")


@dataclass(frozen=True)
class LlmResponse:
    text: str
    first_token_logprob: float | None = None


@dataclass(frozen=True)
class SearchHit:
    url: str
    title: str
    snippet: str
    rank: int


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ScrapedDocument:
    """One fetched page: the unit the timeline is built from."""

    url: str
    title: str
    publication_date: date | None
    body: str
    retrieval_round: int = 1


class SearchProvider(Protocol):
    def search(
        self, query: str, geo_scope: str, date_window: MonitoringRange, top_k: int = 10
    ) -> list[SearchHit]: ...


class ScrapeProvider(Protocol):
    def scrape(self, url: str) -> ScrapedDocument: ...


class LlmProvider(Protocol):
    def complete(self, request: LlmRequest) -> LlmResponse: ...


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


def with_retries(
    call: Callable[[], object],
    attempts: int = 3,
    base_delay: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
):
    """Run ``call`` with bounded retries on transport and rate-limit errors.

    Exponential backoff starting at ``base_delay`` seconds; a rate-limit
    hint overrides the backoff. Other exceptions propagate immediately.
    """
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            return call()
        except RateLimitError as exc:
            last = exc
            delay = exc.retry_after
        except TransportError as exc:
            last = exc
            delay = base_delay * (2**attempt)
        if attempt < attempts - 1:
            sleep(delay)
    assert last is not None
    raise last
