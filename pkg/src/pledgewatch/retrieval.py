"""Multi-round evidence retrieval.

Round 1 searches the composed pledge query plus noun-phrase queries and
scrapes the hits. Hypothetical evidence passages then seed sentence-level
BM25 ranking over the scraped text; the top sentences are re-ranked by
embedding similarity and turned into clarification questions, which
become the next round's search queries. The final document set is
deduplicated by normalized URL and by body text.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from .domain import MonitoringRange, Pledge
from .errors import EmptyResponseError, ProviderError, ScrapeError
from .providers.base import (
    EmbeddingProvider,
    LlmProvider,
    LlmRequest,
    ScrapedDocument,
    ScrapeProvider,
    SearchHit,
    SearchProvider,
)
from .ranking import BM25
from .textutil import noun_phrases, split_sentences

_MONTH_ABBREV = [
    "", "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
]

_TRACKING_PARAMS = ("fbclid", "gclid")

_SYSTEM_INSTRUCTION = "You are a careful research assistant for a fact-checking team."

_HYPO_DOC_PROMPT = """\
Your task is to write short hypothetical news passages that could plausibly report \
progress on the given claim. They will be used to find real evidence, so keep them \
concrete and specific. Use the example evidence passages as a guide for tone.

{icl}

Now, write {count} short hypothetical passages, separated by blank lines, that \
simulate possible evidence about the fulfilment of the following claim:

Claim: {claim}"""

_QUESTION_PROMPT = """\
Your task is to generate a question based on the given claim and evidence. \
The question should clarify the relationship between the evidence and the claim.

{icl}

Now, generate a question that links the following claim and evidence:

Claim: {claim}
Evidence: {evidence}"""


@dataclass(frozen=True)
class EvidenceSentence:
    text: str
    source_url: str
    bm25_score: float
    semantic_score: float | None = None


@dataclass(frozen=True)
class ClarificationQuestion:
    text: str
    provoking_evidence: EvidenceSentence


@dataclass(frozen=True)
class QuestionEvidencePair:
    question: str
    evidence: str


@dataclass
class RerankResult:
    sentences: list[EvidenceSentence]
    degraded: bool = False


@dataclass
class RetrievalConfig:
    rounds: int = 2
    hits_per_query: int = 10
    bm25_top_k: int = 10
    rerank_top_k: int = 5
    max_questions: int = 5
    hypodoc_count: int = 2
    seed_pairs_k: int = 10
    # Hypothetical passages double as BM25 queries, not just re-rank anchors.
    hypodocs_as_bm25_queries: bool = True
    scrape_workers: int = 4


@dataclass
class RetrievalResult:
    documents: list[ScrapedDocument]
    query_log: list[dict]
    scrape_failures: list[dict]
    questions: list[ClarificationQuestion] = field(default_factory=list)
    hypothetical_documents: list[str] = field(default_factory=list)
    warning: str | None = None


def format_pledge_date(d) -> str:
    return f"{d.day:02d}-{_MONTH_ABBREV[d.month]}-{d.year}"


def build_initial_queries(pledge: Pledge) -> list[str]:
    """Composed pledge query first, then one query per claim noun phrase."""
    composed = f"{pledge.speaker}: {pledge.claim} ({format_pledge_date(pledge.date_made)})"
    queries = [composed]
    for phrase in extract_noun_phrases(pledge.claim):
        if phrase not in queries:
            queries.append(phrase)
    return queries


def extract_noun_phrases(text: str) -> list[str]:
    return noun_phrases(text)


def normalize_url(url: str) -> str:
    """Canonical dedup key: lowercase scheme/host, no fragment, no tracking params."""
    parts = urlsplit(url.strip())
    query_pairs = [
        (key, value)
        for key, value in parse_qsl(parts.query, keep_blank_values=True)
        if not key.lower().startswith("utm_") and key.lower() not in _TRACKING_PARAMS
    ]
    return urlunsplit(
        (
            parts.scheme.lower(),
            parts.netloc.lower(),
            parts.path,
            urlencode(query_pairs),
            "",
        )
    )


def dedup_documents(documents: list[ScrapedDocument]) -> list[ScrapedDocument]:
    """Collapse URL duplicates (earliest round wins) and identical bodies."""
    ordered = sorted(enumerate(documents), key=lambda p: (p[1].retrieval_round, p[0]))
    by_url: dict[str, ScrapedDocument] = {}
    seen_bodies: set[str] = set()
    kept: list[tuple[int, ScrapedDocument]] = []
    for position, doc in ordered:
        key = normalize_url(doc.url)
        body_key = " ".join(doc.body.split())
        if key in by_url or body_key in seen_bodies:
            continue
        by_url[key] = doc
        seen_bodies.add(body_key)
        kept.append((position, doc))
    kept.sort(key=lambda p: p[0])
    return [doc for _, doc in kept]


def load_seed_pairs() -> list[QuestionEvidencePair]:
    """Bundled question-evidence pairs used as ICL for generation prompts."""
    raw = resources.files("pledgewatch.data").joinpath("question_evidence_seed.json")
    rows = json.loads(raw.read_text(encoding="utf-8"))
    return [QuestionEvidencePair(question=r["question"], evidence=r["evidence"]) for r in rows]


def select_seed_pairs(
    key_text: str, pairs: list[QuestionEvidencePair], k: int = 10
) -> list[QuestionEvidencePair]:
    """Closest pairs to the pledge claim by BM25 over question+evidence text."""
    if not pairs:
        return []
    index = BM25([f"{p.question} {p.evidence}" for p in pairs])
    return [pairs[i] for i, _ in index.rank(key_text, top_k=k)]


def _icl_block(pairs: list[QuestionEvidencePair]) -> str:
    return "\n\n".join(f"Evidence: {p.evidence}\nQuestion: {p.question}" for p in pairs)


def generate_hypothetical_documents(
    pledge: Pledge,
    icl: list[QuestionEvidencePair],
    llm: LlmProvider,
    count: int = 2,
) -> list[str]:
    """LLM-written passages that simulate plausible fulfilment evidence."""
    if not icl:
        raise ValueError("icl pairs must be non-empty")
    request = LlmRequest(
        system_instruction=_SYSTEM_INSTRUCTION,
        prompt=_HYPO_DOC_PROMPT.format(icl=_icl_block(icl), count=count, claim=pledge.claim),
        temperature=0.6,
        nucleus_mass=0.9,
        max_output=512,
    )
    try:
        response = llm.complete(request)
    except EmptyResponseError:
        return []
    passages = [part.strip() for part in response.text.split("\n\n")]
    return [p for p in passages if p]


def rank_sentences_bm25(
    queries: list[str], documents: list[ScrapedDocument], top_k: int = 10
) -> list[EvidenceSentence]:
    """Split documents into sentences and score them against all queries pooled."""
    if not documents:
        raise ValueError("documents must be non-empty")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    sentences: list[tuple[str, str]] = []
    for doc in documents:
        for sentence in split_sentences(doc.body):
            sentences.append((sentence, doc.url))
    if not sentences:
        return []
    index = BM25([text for text, _ in sentences])
    combined = " ".join(queries)
    ranked = index.rank(combined, top_k=top_k)
    return [
        EvidenceSentence(text=sentences[i][0], source_url=sentences[i][1], bm25_score=score)
        for i, score in ranked
    ]


def cosine_similarity(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    norm_a = sum(x * x for x in a) ** 0.5
    norm_b = sum(y * y for y in b) ** 0.5
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def rerank_semantic(
    anchor: str,
    candidates: list[EvidenceSentence],
    top_k: int,
    embedder: EmbeddingProvider,
) -> RerankResult:
    """Order candidates by embedding similarity to the anchor text.

    On embedding failure the candidates come back unchanged with the
    degraded flag set, so the pipeline can continue on BM25 order alone.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    try:
        vectors = embedder.embed([anchor] + [c.text for c in candidates])
    except ProviderError:
        return RerankResult(sentences=list(candidates), degraded=True)
    anchor_vec = vectors[0].values
    scored = [
        EvidenceSentence(
            text=c.text,
            source_url=c.source_url,
            bm25_score=c.bm25_score,
            semantic_score=cosine_similarity(anchor_vec, vectors[i + 1].values),
        )
        for i, c in enumerate(candidates)
    ]
    scored.sort(key=lambda s: -s.semantic_score)
    return RerankResult(sentences=scored[:top_k])


def generate_questions(
    pledge: Pledge,
    evidence: list[EvidenceSentence],
    icl: list[QuestionEvidencePair],
    llm: LlmProvider,
) -> list[ClarificationQuestion]:
    """One clarification question per evidence sentence; blanks are dropped."""
    if not evidence:
        raise ValueError("evidence must be non-empty")
    icl_block = _icl_block(icl)
    questions = []
    for sentence in evidence:
        request = LlmRequest(
            system_instruction=_SYSTEM_INSTRUCTION,
            prompt=_QUESTION_PROMPT.format(
                icl=icl_block, claim=pledge.claim, evidence=sentence.text
            ),
            temperature=0.6,
            nucleus_mass=0.9,
            max_output=128,
        )
        try:
            response = llm.complete(request)
        except EmptyResponseError:
            continue
        text = response.text.strip()
        if not text:
            continue
        if not text.endswith("?"):
            text = text.rstrip(".!") + "?"
        questions.append(ClarificationQuestion(text=text, provoking_evidence=sentence))
    return questions


def _scrape_batch(
    urls: list[str],
    round_number: int,
    scraper: ScrapeProvider,
    cache: dict[str, ScrapedDocument],
    failures: list[dict],
    workers: int,
) -> list[ScrapedDocument]:
    """Scrape unseen URLs concurrently, preserving input order in the output."""
    pending: list[str] = []
    pending_keys: set[str] = set()
    for url in urls:
        key = normalize_url(url)
        if key in cache or key in pending_keys:
            continue
        pending_keys.add(key)
        pending.append(url)

    def fetch(url: str):
        try:
            return scraper.scrape(url)
        except ScrapeError as exc:
            return exc

    results = []
    if pending:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(fetch, pending))
    documents = []
    for url, outcome in zip(pending, results):
        if isinstance(outcome, ScrapeError):
            failures.append({"round": round_number, "url": url, "error": str(outcome)})
            continue
        doc = ScrapedDocument(
            url=outcome.url,
            title=outcome.title,
            publication_date=outcome.publication_date,
            body=outcome.body,
            retrieval_round=round_number,
        )
        cache[normalize_url(url)] = doc
        documents.append(doc)
    return documents


def retrieve(
    pledge: Pledge,
    date_range: MonitoringRange,
    search: SearchProvider,
    scraper: ScrapeProvider,
    llm: LlmProvider,
    embedder: EmbeddingProvider,
    config: RetrievalConfig | None = None,
    seed_pairs: list[QuestionEvidencePair] | None = None,
    reused_round1: dict[str, list[SearchHit]] | None = None,
) -> RetrievalResult:
    """Run the full multi-round retrieval loop and return the deduped set.

    ``reused_round1`` short-circuits round-1 searches with cached hits
    from a previous run of a matching pledge; reused entries are marked
    in the query log.
    """
    config = config or RetrievalConfig()
    query_log: list[dict] = []
    failures: list[dict] = []
    cache: dict[str, ScrapedDocument] = {}
    all_documents: list[ScrapedDocument] = []
    all_questions: list[ClarificationQuestion] = []
    hypodocs: list[str] = []

    queries = build_initial_queries(pledge)
    round_number = 1
    round1_had_hits = False
    while round_number <= config.rounds and queries:
        round_urls: list[str] = []
        for query in queries:
            reused = bool(reused_round1 and round_number == 1 and query in reused_round1)
            if reused:
                hits = reused_round1[query][: config.hits_per_query]
            else:
                hits = search.search(query, pledge.geo_scope, date_range, config.hits_per_query)
            entry = {
                "round": round_number,
                "query": query,
                "hits": [{"url": h.url, "rank": h.rank} for h in hits],
            }
            if reused:
                entry["reused"] = True
            query_log.append(entry)
            round_urls.extend(h.url for h in hits)
            if round_number == 1 and hits:
                round1_had_hits = True

        documents = _scrape_batch(
            round_urls, round_number, scraper, cache, failures, config.scrape_workers
        )
        all_documents.extend(documents)

        if round_number == 1 and not all_documents:
            warning = None
            if round1_had_hits:
                warning = "all round-1 scrapes failed; returning an empty document set"
            return RetrievalResult(
                documents=[],
                query_log=query_log,
                scrape_failures=failures,
                warning=warning,
            )

        if round_number >= config.rounds:
            break

        if round_number == 1:
            pairs = seed_pairs if seed_pairs is not None else load_seed_pairs()
            selected = select_seed_pairs(pledge.claim, pairs, config.seed_pairs_k)
            if selected:
                hypodocs = generate_hypothetical_documents(
                    pledge, selected, llm, config.hypodoc_count
                )
        else:
            selected = select_seed_pairs(
                pledge.claim,
                seed_pairs if seed_pairs is not None else load_seed_pairs(),
                config.seed_pairs_k,
            )

        bm25_queries = list(build_initial_queries(pledge))
        if hypodocs and config.hypodocs_as_bm25_queries:
            bm25_queries.extend(hypodocs)
        current = dedup_documents(all_documents)
        sentences = rank_sentences_bm25(bm25_queries, current, config.bm25_top_k)
        if not sentences:
            break
        anchor = " ".join(hypodocs) if hypodocs else pledge.claim
        reranked = rerank_semantic(anchor, sentences, config.rerank_top_k, embedder)
        questions = generate_questions(pledge, reranked.sentences, selected, llm)
        questions = questions[: config.max_questions]
        all_questions.extend(questions)
        if not questions:
            break
        queries = [q.text for q in questions]
        round_number += 1

    return RetrievalResult(
        documents=dedup_documents(all_documents),
        query_log=query_log,
        scrape_failures=failures,
        questions=all_questions,
        hypothetical_documents=hypodocs,
    )
