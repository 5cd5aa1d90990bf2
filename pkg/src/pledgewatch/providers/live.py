"""Live provider adapters: JSON web-search API, HTTP scraping, hosted LLM.

The search adapter targets the common custom-search JSON shape (key,
cx/engine id, gl geo restriction, date-range sort). The LLM and
embedding adapters speak the widely-used chat-completions and
embeddings endpoint shapes. Every call goes through bounded retries
with an overall per-call timeout; nothing blocks indefinitely.
"""

from __future__ import annotations

import threading
from datetime import date
from typing import Sequence

import httpx

from ..domain import MonitoringRange
from ..errors import (
    EmptyResponseError,
    ProviderError,
    RateLimitError,
    ScrapeError,
    TransportError,
)
from .base import (
    EmbeddingVector,
    LlmRequest,
    LlmResponse,
    ScrapedDocument,
    SearchHit,
    with_retries,
)
from .htmltext import extract_page

_GEO_CODES = {
    "uk": "uk",
    "united kingdom": "uk",
    "gb": "uk",
    "great britain": "uk",
    "us": "us",
    "united states": "us",
}


def _geo_code(geo_scope: str) -> str | None:
    key = geo_scope.strip().lower()
    if key in _GEO_CODES:
        return _GEO_CODES[key]
    if len(key) == 2 and key.isalpha():
        return key
    return None


def _raise_for_status(response: httpx.Response):
    if response.status_code == 429:
        retry_after = float(response.headers.get("retry-after", "1"))
        raise RateLimitError(retry_after=retry_after)
    if response.status_code >= 500:
        raise TransportError(f"server error {response.status_code}")
    if response.status_code >= 400:
        raise ProviderError(f"provider rejected request: {response.status_code} {response.text[:200]}")


class LiveSearchProvider:
    def __init__(
        self,
        api_key: str,
        engine_id: str,
        endpoint: str = "https://www.googleapis.com/customsearch/v1",
        client: httpx.Client | None = None,
        timeout: float = 15.0,
    ):
        self._api_key = api_key
        self._engine_id = engine_id
        self._endpoint = endpoint
        self._client = client or httpx.Client(timeout=timeout)

    def search(
        self, query: str, geo_scope: str, date_window: MonitoringRange, top_k: int = 10
    ) -> list[SearchHit]:
        params = {
            "key": self._api_key,
            "cx": self._engine_id,
            "q": query,
            "num": min(top_k, 10),
            "sort": "date:r:{}:{}".format(
                date_window.start.strftime("%Y%m%d"), date_window.end.strftime("%Y%m%d")
            ),
        }
        geo = _geo_code(geo_scope)
        if geo:
            params["gl"] = geo

        def call():
            try:
                response = self._client.get(self._endpoint, params=params)
            except httpx.HTTPError as exc:
                raise TransportError(str(exc)) from exc
            _raise_for_status(response)
            return response.json()

        payload = with_retries(call)
        hits = []
        for i, item in enumerate(payload.get("items", [])[:top_k]):
            hits.append(
                SearchHit(
                    url=item.get("link", ""),
                    title=item.get("title", ""),
                    snippet=item.get("snippet", ""),
                    rank=i + 1,
                )
            )
        return hits


class LiveScrapeProvider:
    """Fetch and extract article text; at most 2 in-flight requests per host."""

    def __init__(self, client: httpx.Client | None = None, timeout: float = 20.0):
        self._client = client or httpx.Client(
            timeout=timeout,
            follow_redirects=True,
            headers={"User-Agent": "pledgewatch/0.1 (+evidence collection)"},
        )
        self._host_slots: dict[str, threading.Semaphore] = {}
        self._lock = threading.Lock()

    def _slot(self, url: str) -> threading.Semaphore:
        host = httpx.URL(url).host or ""
        with self._lock:
            if host not in self._host_slots:
                self._host_slots[host] = threading.Semaphore(2)
            return self._host_slots[host]

    def scrape(self, url: str) -> ScrapedDocument:
        if not url.startswith(("http://", "https://")):
            raise ScrapeError(url, "malformed URL")
        with self._slot(url):
            try:
                response = self._client.get(url)
            except httpx.HTTPError as exc:
                raise ScrapeError(url, f"fetch failed: {exc}") from exc
        if response.status_code != 200:
            raise ScrapeError(url, f"HTTP {response.status_code}")
        content_type = response.headers.get("content-type", "")
        if "html" not in content_type and "xml" not in content_type:
            raise ScrapeError(url, f"not HTML ({content_type or 'unknown content type'})")
        page = extract_page(response.text)
        if not page.body:
            raise ScrapeError(url, "empty extraction")
        return ScrapedDocument(
            url=url,
            title=page.title,
            publication_date=page.publication_date,
            body=page.body,
        )


class LiveLlmProvider:
    def __init__(
        self,
        api_key: str,
        model: str,
        endpoint: str = "https://api.openai.com/v1",
        client: httpx.Client | None = None,
        timeout: float = 120.0,
    ):
        self._api_key = api_key
        self._model = model
        self._endpoint = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def complete(self, request: LlmRequest) -> LlmResponse:
        body = {
            "model": self._model,
            "messages": [
                {"role": "system", "content": request.system_instruction},
                {"role": "user", "content": request.prompt},
            ],
            "temperature": request.temperature,
            "top_p": request.nucleus_mass,
            "max_tokens": request.max_output,
        }
        if request.want_first_token_logprob:
            body["logprobs"] = True

        def call():
            try:
                response = self._client.post(
                    f"{self._endpoint}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {self._api_key}"},
                )
            except httpx.HTTPError as exc:
                raise TransportError(str(exc)) from exc
            _raise_for_status(response)
            return response.json()

        payload = with_retries(call)
        choices = payload.get("choices", [])
        if not choices:
            raise EmptyResponseError("no choices in completion response")
        text = (choices[0].get("message", {}) or {}).get("content") or ""
        if not text.strip():
            raise EmptyResponseError("completion text empty")
        logprob = None
        if request.want_first_token_logprob:
            content = ((choices[0].get("logprobs") or {}).get("content")) or []
            if content:
                logprob = content[0].get("logprob")
        return LlmResponse(text=text, first_token_logprob=logprob)


class LiveEmbeddingProvider:
    def __init__(
        self,
        api_key: str,
        model: str,
        endpoint: str = "https://api.openai.com/v1",
        client: httpx.Client | None = None,
        timeout: float = 60.0,
    ):
        self._api_key = api_key
        self._model = model
        self._endpoint = endpoint.rstrip("/")
        self._client = client or httpx.Client(timeout=timeout)

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        if not texts:
            raise ValueError("texts must be non-empty")

        def call():
            try:
                response = self._client.post(
                    f"{self._endpoint}/embeddings",
                    json={"model": self._model, "input": list(texts)},
                    headers={"Authorization": f"Bearer {self._api_key}"},
                )
            except httpx.HTTPError as exc:
                raise TransportError(str(exc)) from exc
            _raise_for_status(response)
            return response.json()

        payload = with_retries(call)
        rows = sorted(payload.get("data", []), key=lambda row: row.get("index", 0))
        return [EmbeddingVector(values=tuple(row["embedding"])) for row in rows]
