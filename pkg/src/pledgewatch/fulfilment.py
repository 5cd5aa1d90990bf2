"""Fulfilment filtering: decide which candidate events belong on the timeline.

Each event is classified Yes/No against the pledge with in-context
examples drawn from the annotated corpus (the matched pledge's own
annotations when available, otherwise a seeded random sample, capped at
50). The first predicted token's log-probability becomes a confidence
score for downstream ranking.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass

from .domain import (
    DECISION_NOT_USEFUL,
    DECISION_USEFUL,
    AnnotatedInstance,
    MonitoringRange,
    Pledge,
    Timeline,
    TimelineEvent,
    sort_timeline,
)
from .errors import ClassificationError, ProviderError
from .matcher import MATCH_THRESHOLD, build_index, suggest_similar
from .providers.base import LlmProvider, LlmRequest
from .timeline import ExtractedEvent

logger = logging.getLogger(__name__)

MAX_ICL_EXAMPLES = 50

ORIGIN_MATCHED = "matched_pledge"
ORIGIN_RANDOM = "global_random"
ORIGIN_FEEDBACK = "feedback"

_SYSTEM_INSTRUCTION = "You are a careful research assistant for a fact-checking team."

_TASK_PREAMBLE = """\
You are given a pledge, the pledge speaker, and the date of when the pledge is made, \
and a key event summarized from an online article along with the date of when the \
event happens. Your task is to determine whether this event summary is useful to \
track the fulfilment of this pledge.

Yes: The summary presents developments or actions that demonstrate progress (or lack \
thereof) towards fulfilling the pledge. It helps evaluate whether the pledge is on \
track or not.

No: The summary only provides background or contextual information, but no progress \
information for evaluating the fulfilment of the pledge; Or the summary is less than \
or not related to the pledge."""


@dataclass(frozen=True)
class FilterDecision:
    label: str
    confidence: float
    raw_first_token: str
    logprob_available: bool = True
    parse_failed: bool = False


@dataclass
class IclPool:
    instances: list[AnnotatedInstance]
    origin: str


@dataclass
class FilterOutcome:
    timeline: Timeline
    decisions: list[tuple[ExtractedEvent, FilterDecision]]
    classification_failures: list[dict]


def select_icl_examples(
    pledge: Pledge,
    corpus: list[AnnotatedInstance],
    feedback: list[AnnotatedInstance],
    max_n: int = MAX_ICL_EXAMPLES,
    seed: int = 0,
) -> IclPool:
    """Pick the in-context examples for this pledge.

    A pledge matching a previously annotated one (tf-idf score above the
    match threshold) takes that pledge's own instances first, then its
    feedback records. Otherwise a uniform seeded sample over everything.
    """
    matched_id = _match_against_known(pledge, corpus + feedback)
    if matched_id is not None:
        own_corpus = [i for i in corpus if i.pledge.id == matched_id]
        own_feedback = [i for i in feedback if i.pledge.id == matched_id]
        instances = (own_corpus + own_feedback)[:max_n]
        return IclPool(instances=instances, origin=ORIGIN_MATCHED)

    population = corpus + feedback
    if not population:
        logger.warning("no annotated instances available; classification will run zero-shot")
        return IclPool(instances=[], origin=ORIGIN_RANDOM)
    rng = random.Random(seed)
    instances = rng.sample(population, min(max_n, len(population)))
    origin = ORIGIN_RANDOM if corpus else ORIGIN_FEEDBACK
    return IclPool(instances=instances, origin=origin)


def _match_against_known(pledge: Pledge, instances: list[AnnotatedInstance]) -> str | None:
    known: dict[str, Pledge] = {}
    for instance in instances:
        known.setdefault(instance.pledge.id, instance.pledge)
    if not known:
        return None
    index = build_index(list(known.values()))
    suggestions = suggest_similar(index, pledge.claim, top_k=1)
    if suggestions and suggestions[0][1] >= MATCH_THRESHOLD:
        return suggestions[0][0]
    return None


def _instance_block(instance: AnnotatedInstance) -> str:
    answer = "Yes" if instance.label == DECISION_USEFUL else "No"
    return (
        "Input:\n\n"
        f"Pledge: {instance.pledge.claim}\n"
        f"Speaker: {instance.pledge.speaker}\n"
        f"Pledge Date: {instance.pledge.date_made.isoformat()}\n"
        f"Event summary: {_dot(instance.event)}\n"
        f"(Event Date: {instance.timestamp.iso()})\n\n"
        f"Output: {answer}"
    )


def _dot(text: str) -> str:
    text = text.rstrip()
    return text if text.endswith((".", "!", "?")) else text + "."


def build_classification_prompt(
    pledge: Pledge, event: ExtractedEvent, pool: IclPool
) -> LlmRequest:
    if event.normalized is None:
        raise ValueError("event must have a normalized date")
    sections = [_TASK_PREAMBLE]
    if pool.instances:
        sections.append("Below are examples:")
        sections.append("\n\n".join(_instance_block(i) for i in pool.instances))
    sections.append("Now, please assign a label to the below instance.")
    sections.append(
        "Input:\n\n"
        f"Pledge: {pledge.claim}\n"
        f"Speaker: {pledge.speaker}\n"
        f"Pledge Date: {pledge.date_made.isoformat()}\n"
        f"Event summary: {_dot(event.description)}\n"
        f"(Event Date: {event.normalized.iso()})\n\n"
        "Output:"
    )
    return LlmRequest(
        system_instruction=_SYSTEM_INSTRUCTION,
        prompt="\n\n".join(sections),
        temperature=0.0,
        nucleus_mass=1.0,
        max_output=8,
        want_first_token_logprob=True,
    )


def classify_event(
    pledge: Pledge, event: ExtractedEvent, pool: IclPool, llm: LlmProvider
) -> FilterDecision:
    """Yes/No usefulness decision with confidence from the first-token logprob."""
    request = build_classification_prompt(pledge, event, pool)
    try:
        response = llm.complete(request)
    except ProviderError as exc:
        raise ClassificationError(f"classification failed for event {event.description!r}: {exc}") from exc

    tokens = response.text.strip().split()
    raw_first = tokens[0] if tokens else ""
    normalized_token = raw_first.strip(".,:;!\"'`").lower()
    if normalized_token not in ("yes", "no"):
        return FilterDecision(
            label=DECISION_NOT_USEFUL,
            confidence=0.0,
            raw_first_token=raw_first,
            logprob_available=response.first_token_logprob is not None,
            parse_failed=True,
        )
    label = DECISION_USEFUL if normalized_token == "yes" else DECISION_NOT_USEFUL
    if response.first_token_logprob is not None:
        confidence = min(1.0, math.exp(response.first_token_logprob))
        available = True
    else:
        confidence = 1.0
        available = False
    return FilterDecision(
        label=label,
        confidence=confidence,
        raw_first_token=raw_first,
        logprob_available=available,
    )


def filter_timeline(
    pledge: Pledge,
    candidates: list[ExtractedEvent],
    pool: IclPool,
    llm: LlmProvider,
    keep_all: bool = False,
    date_range: MonitoringRange | None = None,
    order: str = "reverse_chronological",
) -> FilterOutcome:
    """Classify every candidate and assemble the timeline.

    ``keep_all`` (review mode) keeps filtered-out events in the timeline
    with their decisions so a reviewer can compare; otherwise only
    useful events remain. Event text, dates, and URLs pass through
    untouched; ordering is the deterministic timeline sort.
    """
    if date_range is None:
        raise ValueError("date_range is required to build a timeline")
    decisions: list[tuple[ExtractedEvent, FilterDecision]] = []
    failures: list[dict] = []
    for event in candidates:
        try:
            decision = classify_event(pledge, event, pool, llm)
        except ClassificationError as exc:
            failures.append({"event": event.triple(), "error": str(exc)})
            continue
        decisions.append((event, decision))

    events = []
    for event, decision in decisions:
        if not keep_all and decision.label != DECISION_USEFUL:
            continue
        events.append(
            TimelineEvent(
                description=event.description,
                timestamp=event.normalized,
                source_url=event.source_url,
                decision=decision.label,
                confidence=decision.confidence,
            )
        )
    timeline = Timeline(
        pledge_id=pledge.id,
        range=date_range,
        events=tuple(sort_timeline(events, order)),
        order=order,
    )
    return FilterOutcome(timeline=timeline, decisions=decisions, classification_failures=failures)
