"""Generative event extraction and candidate timeline assembly.

Each scraped document is summarized by the LLM into pledge-relevant
events with date expressions, constrained to a JSON shape. Date
expressions are normalized against the document's publication date;
events whose dates cannot be resolved fall back to the publication date
(flagged) or are kept aside as unresolved.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .domain import Pledge
from .errors import EventParseError, NormalizationError, ProviderError
from .providers.base import LlmProvider, LlmRequest, ScrapedDocument
from .temporal import PRECISION_DAY, NormalizedDate, normalize_timestamp

logger = logging.getLogger(__name__)

_SYSTEM_INSTRUCTION = "You are a careful research assistant for a fact-checking team."

_PROMPT_HEADER = (
    "Please only summarize events that are useful for verifying the pledge, "
    "and their dates in the JSON format."
)

_CODE_FENCE = re.compile(r"```(?:json)?\s*\n?(.*?)\n?\s*```", re.DOTALL)
_TRAILING_COMMA = re.compile(r",(\s*[}\]])")

# Rough chars-per-token estimate for budgeting prompts locally.
_CHARS_PER_TOKEN = 4


@dataclass(frozen=True)
class ExtractionExample:
    """One document-to-events demonstration pair for the extraction prompt."""

    title: str
    date: str
    article: str
    output: dict


@dataclass(frozen=True)
class ExtractedEvent:
    description: str
    raw_date_expression: str
    source_url: str
    normalized: NormalizedDate | None = None
    date_fallback: bool = False

    def date_key(self) -> str:
        return self.normalized.iso() if self.normalized else self.raw_date_expression

    def triple(self) -> tuple[str, str, str]:
        return (self.description, self.date_key(), self.source_url)


@dataclass
class ExtractionPrompt:
    request: LlmRequest
    truncated: bool


@dataclass
class CandidateAssembly:
    candidates: list[ExtractedEvent]
    unresolved: list[ExtractedEvent]
    failures: list[dict] = field(default_factory=list)
    truncated_urls: list[str] = field(default_factory=list)


def load_extraction_examples() -> list[ExtractionExample]:
    raw = resources.files("pledgewatch.data").joinpath("extraction_examples.json")
    rows = json.loads(raw.read_text(encoding="utf-8"))
    return [
        ExtractionExample(
            title=r["title"], date=r["date"], article=r["article"], output=r["output"]
        )
        for r in rows
    ]


def _example_block(example: ExtractionExample, pledge_claim: str) -> str:
    output_json = json.dumps(example.output, ensure_ascii=False, indent=2)
    return (
        f"{_PROMPT_HEADER[:-1]}: {pledge_claim}, and their dates in the JSON format.\n\n"
        "Input:\n\n"
        f"Title: {example.title}\n"
        f"Date: {example.date}\n"
        f"Article: {example.article}\n\n"
        f"Output:\n{output_json}"
    )


def estimate_tokens(text: str) -> int:
    return (len(text) + _CHARS_PER_TOKEN - 1) // _CHARS_PER_TOKEN


def build_extraction_prompt(
    pledge: Pledge,
    document: ScrapedDocument,
    icl: list[ExtractionExample],
    max_prompt_tokens: int = 8000,
) -> ExtractionPrompt:
    """Compose the extraction request; oversized bodies are truncated to budget."""
    if len(icl) != 2:
        raise ValueError("extraction prompting uses exactly 2 example pairs")
    if not document.body.strip():
        raise ValueError("document body must be non-empty")
    examples = "\n\n".join(_example_block(e, pledge.claim) for e in icl)
    doc_date = document.publication_date.isoformat() if document.publication_date else "unknown"
    skeleton = (
        f"{_PROMPT_HEADER}\n\n"
        f"{examples}\n\n"
        f"{_PROMPT_HEADER[:-1]}: {pledge.claim}, and their dates in the JSON format.\n\n"
        "Input:\n\n"
        f"Title: {document.title}\n"
        f"Date: {doc_date}\n"
        "Article: {body}\n\n"
        "Output:"
    )
    overhead = estimate_tokens(skeleton.replace("{body}", ""))
    budget_chars = max(0, (max_prompt_tokens - overhead)) * _CHARS_PER_TOKEN
    body = document.body
    truncated = False
    if len(body) > budget_chars:
        marker = "\n[article truncated]"
        body = body[: max(0, budget_chars - len(marker))] + marker
        truncated = True
    request = LlmRequest(
        system_instruction=_SYSTEM_INSTRUCTION,
        prompt=skeleton.replace("{body}", body, 1),
        temperature=0.0,
        nucleus_mass=1.0,
        max_output=1024,
    )
    return ExtractionPrompt(request=request, truncated=truncated)


def _first_balanced_object(text: str) -> str | None:
    start = text.find("{")
    if start == -1:
        return None
    depth = 0
    in_string = False
    escape = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def parse_event_json(response_text: str) -> list[tuple[str, str]]:
    """Extract (description, raw date expression) pairs from LLM output.

    Tolerates surrounding prose and code fences; one repair pass strips
    trailing commas. Raises :class:`EventParseError` when nothing parses.
    """
    if not response_text or not response_text.strip():
        raise EventParseError("empty response")
    candidates = [response_text.strip()]
    fenced = _CODE_FENCE.search(response_text)
    if fenced:
        candidates.append(fenced.group(1).strip())
    balanced = _first_balanced_object(response_text)
    if balanced:
        candidates.append(balanced)
    candidates.extend(_TRAILING_COMMA.sub(r"\1", c) for c in list(candidates))

    payload = None
    for candidate in candidates:
        try:
            parsed = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(parsed, dict):
            payload = parsed
            break
    if payload is None:
        raise EventParseError("no parseable JSON object in response")
    events = payload.get("events")
    if not isinstance(events, list):
        raise EventParseError('JSON object has no "events" array')
    pairs = []
    for item in events:
        if not isinstance(item, dict):
            continue
        description = str(item.get("event", "") or "").strip()
        if not description:
            continue
        raw_date = str(item.get("date", "") or "").strip()
        pairs.append((description, raw_date))
    return pairs


def _normalize_event(
    description: str, raw_date: str, document: ScrapedDocument
) -> ExtractedEvent:
    anchor = document.publication_date
    normalized = None
    fallback = False
    if raw_date:
        try:
            normalized = normalize_timestamp(raw_date, anchor)
        except NormalizationError:
            normalized = None
    if normalized is None and anchor is not None:
        normalized = NormalizedDate(anchor, PRECISION_DAY, raw_date)
        fallback = True
    return ExtractedEvent(
        description=description,
        raw_date_expression=raw_date,
        source_url=document.url,
        normalized=normalized,
        date_fallback=fallback,
    )


def extract_events(
    pledge: Pledge,
    document: ScrapedDocument,
    llm: LlmProvider,
    icl: list[ExtractionExample] | None = None,
    max_prompt_tokens: int = 8000,
) -> tuple[list[ExtractedEvent], ExtractionPrompt, str | None]:
    """Run extraction for one document: prompt, complete, parse, normalize.

    One retry on JSON failure, then the document is skipped; the error
    string comes back to the caller so the run record can keep it.
    """
    icl = icl if icl is not None else load_extraction_examples()
    prompt = build_extraction_prompt(pledge, document, icl, max_prompt_tokens)
    pairs = None
    error = None
    for attempt in range(2):
        try:
            response = llm.complete(prompt.request)
            pairs = parse_event_json(response.text)
            error = None
            break
        except (EventParseError, ProviderError) as exc:
            error = f"{type(exc).__name__}: {exc}"
            logger.warning("extraction attempt %d failed for %s: %s", attempt + 1, document.url, exc)
    if pairs is None:
        return [], prompt, error
    return [_normalize_event(desc, raw, document) for desc, raw in pairs], prompt, error


def assemble_candidates(
    pledge: Pledge,
    documents: list[ScrapedDocument],
    llm: LlmProvider,
    icl: list[ExtractionExample] | None = None,
    max_prompt_tokens: int = 8000,
    workers: int = 4,
) -> CandidateAssembly:
    """Extract from every document and merge into a sorted candidate set.

    Exact (description, date, url) duplicates collapse to one; events
    with no resolvable date are kept aside rather than sorted. The result
    is independent of document order.
    """
    icl = icl if icl is not None else load_extraction_examples()

    def run_one(doc: ScrapedDocument):
        return extract_events(pledge, doc, llm, icl, max_prompt_tokens)

    results = []
    if documents:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(run_one, documents))

    failures = []
    truncated_urls = []
    merged: dict[tuple[str, str, str], ExtractedEvent] = {}
    for doc, (events, prompt, error) in zip(documents, results):
        if error:
            failures.append({"url": doc.url, "error": error})
        if prompt.truncated:
            truncated_urls.append(doc.url)
        for event in events:
            merged.setdefault(event.triple(), event)

    resolved = [e for e in merged.values() if e.normalized is not None]
    unresolved = [e for e in merged.values() if e.normalized is None]
    resolved.sort(key=lambda e: (e.normalized.date.toordinal(), e.source_url, e.description))
    unresolved.sort(key=lambda e: (e.source_url, e.description))
    return CandidateAssembly(
        candidates=resolved,
        unresolved=unresolved,
        failures=sorted(failures, key=lambda f: f["url"]),
        truncated_urls=sorted(truncated_urls),
    )
