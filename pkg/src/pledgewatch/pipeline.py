"""End-to-end run orchestration shared by the CLI and the HTTP service.

A run is: retrieve documents, extract and assemble candidate events,
select ICL examples, classify, and emit the timeline plus audit
artifacts. Stage transitions surface through the optional callback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .dataio import dump_json, dump_jsonl
from .domain import AnnotatedInstance, MonitoringRange, ORDER_REVERSE, Pledge, Timeline
from .fulfilment import FilterOutcome, IclPool, filter_timeline, select_icl_examples
from .providers.base import SearchHit
from .providers.config import Providers
from .retrieval import RetrievalConfig, RetrievalResult, retrieve
from .timeline import CandidateAssembly, assemble_candidates

STAGE_RETRIEVING = "retrieving"
STAGE_EXTRACTING = "extracting"
STAGE_FILTERING = "filtering"


@dataclass
class PipelineOptions:
    keep_all: bool = False
    order: str = ORDER_REVERSE
    seed: int = 0
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    max_prompt_tokens: int = 8000
    extraction_workers: int = 4


@dataclass
class PipelineResult:
    pledge: Pledge
    date_range: MonitoringRange
    options: PipelineOptions
    retrieval: RetrievalResult
    assembly: CandidateAssembly
    pool: IclPool
    outcome: FilterOutcome
    warnings: list[str] = field(default_factory=list)

    @property
    def timeline(self) -> Timeline:
        return self.outcome.timeline


def execute_pipeline(
    pledge: Pledge,
    date_range: MonitoringRange,
    providers: Providers,
    options: PipelineOptions | None = None,
    corpus: list[AnnotatedInstance] | None = None,
    feedback: list[AnnotatedInstance] | None = None,
    on_stage=None,
    reused_round1: dict[str, list[SearchHit]] | None = None,
) -> PipelineResult:
    options = options or PipelineOptions()
    corpus = corpus or []
    feedback = feedback or []
    warnings: list[str] = []

    def stage(name: str):
        if on_stage is not None:
            on_stage(name)

    stage(STAGE_RETRIEVING)
    retrieval_result = retrieve(
        pledge,
        date_range,
        search=providers.search,
        scraper=providers.scraper,
        llm=providers.llm,
        embedder=providers.embedder,
        config=options.retrieval,
        reused_round1=reused_round1,
    )
    if retrieval_result.warning:
        warnings.append(retrieval_result.warning)

    stage(STAGE_EXTRACTING)
    assembly = assemble_candidates(
        pledge,
        retrieval_result.documents,
        providers.llm,
        max_prompt_tokens=options.max_prompt_tokens,
        workers=options.extraction_workers,
    )

    stage(STAGE_FILTERING)
    pool = select_icl_examples(pledge, corpus, feedback, seed=options.seed)
    if not pool.instances:
        warnings.append("ICL pool is empty; filtering ran zero-shot")
    outcome = filter_timeline(
        pledge,
        assembly.candidates,
        pool,
        providers.llm,
        keep_all=options.keep_all,
        date_range=date_range,
        order=options.order,
    )
    for failure in outcome.classification_failures:
        warnings.append(f"classification failed: {failure['error']}")

    return PipelineResult(
        pledge=pledge,
        date_range=date_range,
        options=options,
        retrieval=retrieval_result,
        assembly=assembly,
        pool=pool,
        outcome=outcome,
        warnings=warnings,
    )


def candidate_rows(result: PipelineResult) -> list[dict]:
    """Review-mode rows: every candidate with its decision when available."""
    decisions = {event.triple(): decision for event, decision in result.outcome.decisions}
    rows = []
    for event in result.assembly.candidates:
        decision = decisions.get(event.triple())
        rows.append(
            {
                "description": event.description,
                "raw_date_expression": event.raw_date_expression,
                "date": event.normalized.iso(),
                "precision": event.normalized.precision,
                "date_fallback": event.date_fallback,
                "source_url": event.source_url,
                "decision": decision.label if decision else None,
                "confidence": decision.confidence if decision else None,
            }
        )
    return rows


def write_run_artifacts(result: PipelineResult, out_dir: str | Path) -> dict[str, str]:
    """Persist the run's audit trail; returns artifact name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, str] = {}

    query_log_path = out / "query_log.jsonl"
    dump_jsonl(result.retrieval.query_log, query_log_path)
    paths["query_log"] = str(query_log_path)

    documents_path = out / "documents.jsonl"
    dump_jsonl(
        [
            {
                "url": d.url,
                "title": d.title,
                "publication_date": d.publication_date.isoformat() if d.publication_date else None,
                "body": d.body,
                "retrieval_round": d.retrieval_round,
            }
            for d in result.retrieval.documents
        ],
        documents_path,
    )
    paths["documents"] = str(documents_path)

    candidates_path = out / "candidates.jsonl"
    dump_jsonl(candidate_rows(result), candidates_path)
    paths["candidates"] = str(candidates_path)

    unresolved_path = out / "unresolved.jsonl"
    dump_jsonl(
        [
            {
                "description": e.description,
                "raw_date_expression": e.raw_date_expression,
                "source_url": e.source_url,
            }
            for e in result.assembly.unresolved
        ],
        unresolved_path,
    )
    paths["unresolved"] = str(unresolved_path)

    timeline_path = out / "timeline.json"
    dump_json(result.timeline.to_json_dict(), timeline_path)
    paths["timeline"] = str(timeline_path)

    summary_path = out / "run.json"
    dump_json(
        {
            "pledge": {
                "id": result.pledge.id,
                "speaker": result.pledge.speaker,
                "date_made": result.pledge.date_made.isoformat(),
                "geo_scope": result.pledge.geo_scope,
                "claim": result.pledge.claim,
            },
            "range": {
                "start": result.date_range.start.isoformat(),
                "end": result.date_range.end.isoformat(),
            },
            "options": {
                "keep_all": result.options.keep_all,
                "order": result.options.order,
                "seed": result.options.seed,
            },
            "icl_pool": {"origin": result.pool.origin, "size": len(result.pool.instances)},
            "documents": len(result.retrieval.documents),
            "candidates": len(result.assembly.candidates),
            "unresolved": len(result.assembly.unresolved),
            "timeline_events": len(result.timeline.events),
            "scrape_failures": result.retrieval.scrape_failures,
            "extraction_failures": result.assembly.failures,
            "truncated_documents": result.assembly.truncated_urls,
            "warnings": result.warnings,
        },
        summary_path,
    )
    paths["summary"] = str(summary_path)
    return paths
