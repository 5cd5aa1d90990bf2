"""Build the bundled offline fixture world and freeze golden outputs.

Runs the real pipeline once with a rule-driven recording LLM, captures
every prompt/response pair keyed by prompt hash, writes the fixture
directory, then replays the run purely from the written files and
freezes the verified outputs under tests/data/golden/.

Usage: python tools/build_fixture_world.py
"""

from __future__ import annotations

import json
import math
import re
import sys
from datetime import date
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from pledgewatch.dataio import dump_json, dump_jsonl, load_annotated_corpus
from pledgewatch.domain import MonitoringRange, ORDER_REVERSE, validate_pledge
from pledgewatch.pipeline import (
    PipelineOptions,
    candidate_rows,
    execute_pipeline,
)
from pledgewatch.providers.base import LlmResponse
from pledgewatch.providers.config import Providers
from pledgewatch.providers.fixtures import (
    FixtureEmbeddingProvider,
    FixtureLlmProvider,
    FixtureScrapeProvider,
    FixtureSearchProvider,
    completion_key,
)

FIXTURES_DIR = REPO / "fixtures" / "trailhunt"
GOLDEN_DIR = REPO / "tests" / "data" / "golden"

URL_A = "https://www.example-news.uk/politics/trail-hunting-ban-manifesto"
URL_B = "https://www.gov-example.uk/consultations/hunting-act-review"
URL_C = "https://www.rural-example.org/stories/hunt-groups-react"
URL_D = "https://www.wildlife-example.org/news/trail-hunting-explained"
URL_E = "https://www.gov-example.uk/news/animal-welfare-reporting"
URL_F = "https://www.parliament-example.uk/bills/hunting-trail-amendment"
URL_G = "https://www.example-news.uk/env/hunting-season-court-challenge"
URL_BROKEN = "https://www.broken-example.net/missing-page"
URL_MIRROR = "https://mirror-example.net/syndicated/trail-hunting-explained"

BODY_D = (
    "Trail hunting involves laying an animal-based scent for hounds to follow. "
    "The charity has urged ministers to create a central reporting mechanism for "
    "potential animal welfare offences alongside a ban on trail hunting. "
    "Supporters say the activity is lawful, while opponents call for a ban on "
    "trail hunting."
)

PAGES = {
    URL_A: {
        "title": "Manifesto pledges ban on trail hunting",
        "date": "2024-07-05",
        "body": (
            "Labour's general election manifesto includes a commitment to ban trail "
            "hunting. The party says the practice has been used as cover for chasing "
            "foxes. Campaigner groups welcomed the commitment and called for early "
            "action. The National Trust banned trail hunting on its land in Autumn "
            "2023."
        ),
    },
    URL_B: {
        "title": "Consultation opens on Hunting Act changes",
        "date": "2024-08-21",
        "body": (
            "The environment department has launched a consultation on amending the "
            "Hunting Act to prohibit trail hunting. Ministers said draft legislation "
            "would follow the consultation. The consultation will run for eight weeks."
        ),
    },
    URL_C: {
        "title": "Hunt groups react to proposed ban",
        "date": "2024-07-20",
        "body": (
            "Hunt supporters gathered to defend trail hunting as a lawful activity. "
            "Critics claim trail hunting is being used as a 'smokescreen' for illegal "
            "fox hunting activities. The row intensified after footage emerged from a "
            "weekend meet."
        ),
    },
    URL_D: {
        "title": "What is trail hunting?",
        "date": None,
        "body": BODY_D,
    },
    URL_E: {
        "title": "Pilot announced for animal welfare reporting mechanism",
        "date": "2024-09-02",
        "body": (
            "The Government has announced a pilot of a central reporting mechanism "
            "for potential animal welfare offences. The pilot will cover three police "
            "force areas. Officials said the mechanism would support enforcement of "
            "any future ban on trail hunting."
        ),
    },
    URL_F: {
        "title": "Hunting Act amendment bill introduced",
        "date": "2024-09-10",
        "body": (
            "A bill to amend the Hunting Act to ban trail hunting received its first "
            "reading in the House of Commons. The bill's sponsor said it would close "
            "loopholes used to evade the existing law. A second reading is expected in "
            "the autumn."
        ),
    },
    URL_G: {
        "title": "High Court hears trail hunting licences challenge",
        "date": "2024-07-08",
        "body": (
            "The High Court heard a challenge over trail hunting licences on National "
            "Trust land two days ago. Campaigners argued the licensing scheme failed "
            "to prevent unlawful hunting. A ruling is expected later this year."
        ),
    },
    URL_BROKEN: {"status": 404},
    URL_MIRROR: {
        "title": "Explainer: trail hunting (syndicated)",
        "date": "2024-07-11",
        "body": BODY_D,
    },
}

QUESTION_REPORTING = (
    "Is Labour planning to implement a central reporting mechanism for reporting "
    "potential animal welfare offences?"
)
QUESTION_LEGISLATION = (
    "When will the Government bring forward legislation to ban trail hunting?"
)

QUERIES = {
    "Labour: We will ban trail hunting (04-Jul-2024)": [
        {"url": URL_A, "title": PAGES[URL_A]["title"], "snippet": "Labour pledges to ban trail hunting"},
        {"url": URL_B, "title": PAGES[URL_B]["title"], "snippet": "Consultation on the Hunting Act"},
        {"url": URL_A + "#section-2", "title": PAGES[URL_A]["title"], "snippet": "Duplicate via fragment"},
        {"url": URL_C, "title": PAGES[URL_C]["title"], "snippet": "Hunt groups react"},
    ],
    "trail hunting": [
        {"url": URL_D, "title": PAGES[URL_D]["title"], "snippet": "Explainer on trail hunting"},
        {"url": URL_A + "?utm_source=feed", "title": PAGES[URL_A]["title"], "snippet": "Duplicate via tracking param"},
        {"url": URL_BROKEN, "title": "Missing page", "snippet": "This page is gone"},
        {"url": URL_MIRROR, "title": PAGES[URL_MIRROR]["title"], "snippet": "Syndicated explainer"},
    ],
    QUESTION_REPORTING: [
        {"url": URL_E, "title": PAGES[URL_E]["title"], "snippet": "Reporting mechanism pilot"},
        {"url": URL_A, "title": PAGES[URL_A]["title"], "snippet": "Seen in round 1 already"},
    ],
    QUESTION_LEGISLATION: [
        {"url": URL_F, "title": PAGES[URL_F]["title"], "snippet": "Amendment bill first reading"},
        {"url": URL_G, "title": PAGES[URL_G]["title"], "snippet": "High Court challenge"},
    ],
}

HYPODOC_TEXT = (
    "The Government has launched a consultation on amending the Hunting Act to "
    "prohibit trail hunting, with ministers signalling that draft legislation will "
    "follow within the year.\n\n"
    "Ministers confirmed that a ban on trail hunting will be included in an animal "
    "welfare bill, alongside a central reporting mechanism for potential animal "
    "welfare offences."
)

QUESTION_RULES = [
    ("reporting mechanism", QUESTION_REPORTING),
    ("consultation", QUESTION_LEGISLATION),
    ("High Court", "What is the outcome of the legal challenge over trail hunting licences?"),
    ("manifesto", "Has the trail hunting ban been included in the legislative programme?"),
    ("first reading", "Which stage has the Hunting Act amendment bill reached?"),
]
QUESTION_FALLBACK = "What progress has been made on banning trail hunting since July 2024?"

EVENTS_BY_TITLE = {
    PAGES[URL_A]["title"]: [
        {"event": "Labour's manifesto commits to banning trail hunting.", "date": "2024-07-04"},
        {"event": "The National Trust banned trail hunting on its land.", "date": "Autumn 2023"},
    ],
    PAGES[URL_B]["title"]: [
        {
            "event": "The environment department launches a consultation on amending the Hunting Act to prohibit trail hunting.",
            "date": "2024-08-21",
        },
        {"event": "Ministers say draft legislation will follow the consultation.", "date": "soon"},
    ],
    PAGES[URL_C]["title"]: [
        {
            "event": "Critics claim trail hunting is being used as a 'smokescreen' for illegal fox hunting activities.",
            "date": "2024-07-19",
        }
    ],
    PAGES[URL_D]["title"]: [
        {
            "event": "The charity proposes a central reporting mechanism for potential animal welfare offences.",
            "date": "",
        }
    ],
    PAGES[URL_E]["title"]: [
        {
            "event": "The Government announces a pilot of a central reporting mechanism for potential animal welfare offences.",
            "date": "2024-09-02",
        }
    ],
    PAGES[URL_F]["title"]: [
        {
            "event": "A bill to amend the Hunting Act to ban trail hunting receives its first reading in the Commons.",
            "date": "2024-09-10",
        }
    ],
    PAGES[URL_G]["title"]: [
        {
            "event": "The High Court hears a challenge over trail hunting licences on National Trust land.",
            "date": "two days ago",
        }
    ],
}

CLASSIFY_RULES = [
    ("manifesto commits", ("No", math.log(0.95))),
    ("National Trust banned", ("No", math.log(0.9))),
    ("consultation on amending", ("Yes", math.log(0.9))),
    ("draft legislation will follow", ("Yes", math.log(0.8))),
    ("smokescreen", ("No", math.log(0.97))),
    ("pilot of a central reporting", ("Yes", math.log(0.85))),
    ("first reading", ("Yes", math.log(0.93))),
    ("High Court hears", ("No", math.log(0.7))),
]

ANNOTATIONS = [
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "Labour will end the VAT exemption and business rates relief for private schools",
        },
        "event": "Draft legislation applying VAT to private school fees is published.",
        "timestamp": "2024-10-30",
        "url": "https://www.gov-example.uk/vat-private-schools-draft",
        "label": "useful",
    },
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "Labour will end the VAT exemption and business rates relief for private schools",
        },
        "event": "Private school families lost their High Court challenge against the Government over the VAT policy on fees.",
        "timestamp": "2025-06-13",
        "url": "https://www.example-news.uk/private-schools-vat-challenge",
        "label": "useful",
    },
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "Labour will end the VAT exemption and business rates relief for private schools",
        },
        "event": "A commentator explains what VAT exemption means for school fees.",
        "timestamp": "2024-08-02",
        "url": "https://www.example-news.uk/vat-explainer",
        "label": "not_useful",
    },
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "We will capitalise Great British Energy with £8.3 billion",
        },
        "event": "The spending review confirms £8.3 billion for the publicly owned energy company over the parliament.",
        "timestamp": "2025-06-11",
        "url": "https://www.gov-example.uk/spending-review-energy",
        "label": "useful",
    },
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "We will capitalise Great British Energy with £8.3 billion",
        },
        "event": "An opinion piece argues the energy company will distort the market.",
        "timestamp": "2024-09-14",
        "url": "https://www.example-news.uk/gb-energy-opinion",
        "label": "not_useful",
    },
    {
        "pledge": {
            "speaker": "Labour",
            "date_made": "2024-07-04",
            "geo_scope": "UK",
            "claim": "We will capitalise Great British Energy with £8.3 billion",
        },
        "event": "The energy company signs its first offshore wind partnership.",
        "timestamp": "2024-07-25",
        "url": "https://www.example-news.uk/gb-energy-first-deal",
        "label": "useful",
    },
]


class RecordingLlm:
    """Answers prompts by rule and records every exchange keyed by hash."""

    def __init__(self):
        self.records: dict[str, dict] = {}
        self.questions_seen: list[str] = []

    def complete(self, request):
        text, logprob = self._respond(request.prompt)
        entry = {"text": text}
        if logprob is not None:
            entry["first_token_logprob"] = logprob
        self.records[completion_key(request.system_instruction, request.prompt)] = entry
        return LlmResponse(
            text=text,
            first_token_logprob=logprob if request.want_first_token_logprob else None,
        )

    def _respond(self, prompt: str):
        if "hypothetical passages" in prompt:
            return HYPODOC_TEXT, None
        if "Now, generate a question that links" in prompt:
            evidence = prompt.rsplit("Evidence:", 1)[1].strip()
            for needle, question in QUESTION_RULES:
                if needle.lower() in evidence.lower():
                    self.questions_seen.append(question)
                    return question, None
            self.questions_seen.append(QUESTION_FALLBACK)
            return QUESTION_FALLBACK, None
        if "Please only summarize events" in prompt:
            tail = prompt.rsplit("Input:", 1)[1]
            title_match = re.search(r"Title: (.+)", tail)
            title = title_match.group(1).strip() if title_match else ""
            events = EVENTS_BY_TITLE.get(title, [])
            return json.dumps({"events": events}, ensure_ascii=False), None
        if "Now, please assign a label" in prompt:
            summary = prompt.rsplit("Event summary:", 1)[1].split("(Event Date")[0]
            for needle, (answer, logprob) in CLASSIFY_RULES:
                if needle.lower() in summary.lower():
                    return answer, logprob
            raise AssertionError(f"no classification rule for: {summary[:80]!r}")
        raise AssertionError(f"unrecognized prompt: {prompt[:120]!r}")


def build():
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)

    dump_json(QUERIES, FIXTURES_DIR / "queries.json")
    dump_json(PAGES, FIXTURES_DIR / "pages.json")
    dump_jsonl(ANNOTATIONS, FIXTURES_DIR / "annotations.jsonl")

    pledge = validate_pledge("Labour", "2024-07-04", "UK", "We will ban trail hunting")
    date_range = MonitoringRange(start=date(2024, 7, 5), end=date(2024, 9, 30))

    corpus, _ = load_annotated_corpus(FIXTURES_DIR / "annotations.jsonl")
    recorder = RecordingLlm()
    providers = Providers(
        search=FixtureSearchProvider(FIXTURES_DIR),
        scraper=FixtureScrapeProvider(FIXTURES_DIR),
        llm=recorder,
        embedder=FixtureEmbeddingProvider(),
    )
    options = PipelineOptions(keep_all=True, order=ORDER_REVERSE, seed=0)
    result = execute_pipeline(pledge, date_range, providers, options, corpus=corpus)

    round2_queries = {QUESTION_REPORTING, QUESTION_LEGISLATION}
    asked = {q.text for q in result.retrieval.questions}
    missing = round2_queries - asked
    if missing:
        raise AssertionError(f"expected round-2 queries not generated: {missing}")

    urls = [d.url for d in result.retrieval.documents]
    expected_urls = [URL_A, URL_B, URL_C, URL_D, URL_E, URL_F, URL_G]
    if sorted(urls) != sorted(expected_urls):
        raise AssertionError(f"document set mismatch:\n{sorted(urls)}\nvs\n{sorted(expected_urls)}")

    dump_json(recorder.records, FIXTURES_DIR / "completions.json")

    # Replay purely from the written fixture files to verify determinism.
    replay_providers = Providers(
        search=FixtureSearchProvider(FIXTURES_DIR),
        scraper=FixtureScrapeProvider(FIXTURES_DIR),
        llm=FixtureLlmProvider(FIXTURES_DIR),
        embedder=FixtureEmbeddingProvider(),
    )
    replay = execute_pipeline(pledge, date_range, replay_providers, options, corpus=corpus)
    if replay.timeline.to_json_dict() != result.timeline.to_json_dict():
        raise AssertionError("replay timeline differs from recorded run")

    filtered = execute_pipeline(
        pledge,
        date_range,
        replay_providers,
        PipelineOptions(keep_all=False, order=ORDER_REVERSE, seed=0),
        corpus=corpus,
    )

    dump_json(replay.timeline.to_json_dict(), GOLDEN_DIR / "timeline_review.json")
    dump_json(filtered.timeline.to_json_dict(), GOLDEN_DIR / "timeline_filtered.json")
    dump_json(
        [{"url": d.url, "retrieval_round": d.retrieval_round} for d in replay.retrieval.documents],
        GOLDEN_DIR / "documents.json",
    )
    dump_json(candidate_rows(replay), GOLDEN_DIR / "candidates.json")

    print(f"fixture world: {FIXTURES_DIR}")
    print(f"documents: {len(replay.retrieval.documents)}")
    print(f"candidates: {len(replay.assembly.candidates)} (+{len(replay.assembly.unresolved)} unresolved)")
    print(f"review timeline events: {len(replay.timeline.events)}")
    print(f"filtered timeline events: {len(filtered.timeline.events)}")
    print(f"completions recorded: {len(recorder.records)}")
    for event in replay.timeline.events:
        print(f"  {event.timestamp.iso()}  {event.decision:<11} {event.description[:60]}")


if __name__ == "__main__":
    build()
