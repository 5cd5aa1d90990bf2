"""Deterministic offline providers backed by a fixture directory.

The fixture world is a directory of JSON files, one per mapping:

    queries.json      {"<query string>": [{"url", "title", "snippet"}, ...]}
    pages.json        {"<url>": {"title", "date" | null, "body"} | {"status": 404}}
    completions.json  {"<sha256 of system+prompt>": {"text", "first_token_logprob"?}}

All providers here are pure functions of their inputs; a pipeline run
over fixtures is byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
from datetime import date
from pathlib import Path
from typing import Sequence

from ..domain import MonitoringRange
from ..errors import ProviderError, ScrapeError
from ..textutil import tokenize
from .base import EmbeddingVector, LlmRequest, LlmResponse, ScrapedDocument, SearchHit


def completion_key(system_instruction: str, prompt: str) -> str:
    """Stable lookup key for a canned completion."""
    payload = system_instruction + "\x00" + prompt
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class FixtureMissError(ProviderError):
    """No canned completion for this prompt; carries the key to register."""

    def __init__(self, key: str, prompt_head: str):
        self.key = key
        super().__init__(f"no fixture completion for key {key} (prompt starts: {prompt_head!r})")


def _load_json(path: Path) -> dict:
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


class FixtureSearchProvider:
    """Closed-world search: registered queries return canned hits, others nothing."""

    def __init__(self, fixtures_dir: str | Path):
        self._queries = _load_json(Path(fixtures_dir) / "queries.json")

    def search(
        self, query: str, geo_scope: str, date_window: MonitoringRange, top_k: int = 10
    ) -> list[SearchHit]:
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        rows = self._queries.get(query, [])
        return [
            SearchHit(url=row["url"], title=row.get("title", ""), snippet=row.get("snippet", ""), rank=i + 1)
            for i, row in enumerate(rows[:top_k])
        ]


class FixtureScrapeProvider:
    """Serves stored page files; unknown URLs and error entries raise ScrapeError."""

    def __init__(self, fixtures_dir: str | Path):
        self._pages = _load_json(Path(fixtures_dir) / "pages.json")

    def scrape(self, url: str) -> ScrapedDocument:
        entry = self._pages.get(url)
        if entry is None:
            raise ScrapeError(url, "not found")
        if "status" in entry and entry["status"] != 200:
            raise ScrapeError(url, f"HTTP {entry['status']}")
        body = entry.get("body", "")
        if not body.strip():
            raise ScrapeError(url, "empty extraction")
        raw_date = entry.get("date")
        publication = date.fromisoformat(raw_date) if raw_date else None
        return ScrapedDocument(
            url=url,
            title=entry.get("title", ""),
            publication_date=publication,
            body=body,
        )


class FixtureLlmProvider:
    """Completions keyed on a hash of the exact prompt.

    A miss raises :class:`FixtureMissError` with the key; when
    ``pending_log`` is set, the missing prompt is also appended there so
    fixture authors can fill the gap.
    """

    def __init__(self, fixtures_dir: str | Path, pending_log: str | Path | None = None):
        self._dir = Path(fixtures_dir)
        self._completions = _load_json(self._dir / "completions.json")
        self._pending_log = Path(pending_log) if pending_log else None

    def complete(self, request: LlmRequest) -> LlmResponse:
        key = completion_key(request.system_instruction, request.prompt)
        entry = self._completions.get(key)
        if entry is None:
            if self._pending_log is not None:
                with self._pending_log.open("a", encoding="utf-8") as fh:
                    record = {
                        "key": key,
                        "system_instruction": request.system_instruction,
                        "prompt": request.prompt,
                    }
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            raise FixtureMissError(key, request.prompt[:80])
        logprob = entry.get("first_token_logprob")
        if not request.want_first_token_logprob:
            logprob = None
        return LlmResponse(text=entry.get("text", ""), first_token_logprob=logprob)


class FixtureEmbeddingProvider:
    """Deterministic hashing projection; no files needed.

    Each token hashes to a fixed pseudo-random vector and a text embeds
    as the count-weighted sum, so texts sharing vocabulary land close
    together and similarity tests are reproducible.
    """

    def __init__(self, dimension: int = 32):
        self._dimension = dimension
        self._token_cache: dict[str, list[float]] = {}

    def _token_vector(self, token: str) -> list[float]:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        values: list[float] = []
        block = 0
        while len(values) < self._dimension:
            digest = hashlib.sha256(f"{token}:{block}".encode("utf-8")).digest()
            for i in range(0, len(digest) - 1, 2):
                if len(values) >= self._dimension:
                    break
                raw = int.from_bytes(digest[i : i + 2], "big")
                values.append(raw / 65535.0 * 2.0 - 1.0)
            block += 1
        self._token_cache[token] = values
        return values

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        if not texts:
            raise ValueError("texts must be non-empty")
        vectors = []
        for text in texts:
            acc = [0.0] * self._dimension
            for token in tokenize(text):
                tv = self._token_vector(token)
                for i in range(self._dimension):
                    acc[i] += tv[i]
            vectors.append(EmbeddingVector(values=tuple(acc)))
        return vectors
