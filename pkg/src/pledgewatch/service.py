"""Run orchestration, persistence, and the HTTP API.

Persistence is a single SQLite file plus per-run artifact files on disk.
Runs execute on a small worker pool (2 by default, to respect live
quotas); stage status is written through to the store so clients can
poll progress.
"""

from __future__ import annotations

import json
import sqlite3
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from .dataio import load_annotated_corpus
from .domain import (
    DECISION_NOT_USEFUL,
    DECISION_USEFUL,
    ORDER_CHRONOLOGICAL,
    ORDER_REVERSE,
    AnnotatedInstance,
    MonitoringRange,
    Pledge,
    validate_pledge,
)
from .errors import NotFoundError, ValidationError
from .matcher import MATCH_THRESHOLD, PledgeIndex, build_index, suggest_similar
from .pipeline import PipelineOptions, execute_pipeline, write_run_artifacts
from .providers.base import SearchHit
from .providers.config import Providers
from .temporal import normalize_timestamp

STATUS_QUEUED = "queued"
STATUS_RETRIEVING = "retrieving"
STATUS_EXTRACTING = "extracting"
STATUS_FILTERING = "filtering"
STATUS_DONE = "done"
STATUS_FAILED = "failed"

ACTIVE_STATUSES = (STATUS_QUEUED, STATUS_RETRIEVING, STATUS_EXTRACTING, STATUS_FILTERING)

VERDICT_NOT_RELEVANT = "not_relevant"
VERDICT_RELEVANT_SEEN = "relevant_seen"
VERDICT_RELEVANT_UPDATE = "relevant_update"
VERDICTS = (VERDICT_NOT_RELEVANT, VERDICT_RELEVANT_SEEN, VERDICT_RELEVANT_UPDATE)

_STAGE_TO_STATUS = {
    "retrieving": STATUS_RETRIEVING,
    "extracting": STATUS_EXTRACTING,
    "filtering": STATUS_FILTERING,
}


@dataclass
class RunRecord:
    run_id: str
    pledge: Pledge
    range: MonitoringRange
    status: str
    created_at: str
    options: dict
    artifacts: dict = field(default_factory=dict)
    error: str | None = None


@dataclass
class FeedbackRecord:
    run_id: str
    description: str
    timestamp: str
    url: str
    verdict: str
    reviewer: str
    created_at: str


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class RunStore:
    """SQLite-backed store; one connection per operation keeps threads simple."""

    def __init__(self, path: str | Path):
        self._path = str(path)
        with self._connect() as conn:
            conn.executescript(
                """
                CREATE TABLE IF NOT EXISTS pledges (
                    pledge_id TEXT PRIMARY KEY,
                    speaker TEXT NOT NULL,
                    date_made TEXT NOT NULL,
                    geo_scope TEXT NOT NULL,
                    claim TEXT NOT NULL,
                    created_at TEXT NOT NULL
                );
                CREATE TABLE IF NOT EXISTS runs (
                    run_id TEXT PRIMARY KEY,
                    pledge_id TEXT NOT NULL,
                    pledge_json TEXT NOT NULL,
                    range_start TEXT NOT NULL,
                    range_end TEXT NOT NULL,
                    options_json TEXT NOT NULL,
                    status TEXT NOT NULL,
                    created_at TEXT NOT NULL,
                    error TEXT,
                    artifacts_json TEXT NOT NULL DEFAULT '{}'
                );
                CREATE TABLE IF NOT EXISTS feedback (
                    run_id TEXT NOT NULL,
                    description TEXT NOT NULL,
                    timestamp TEXT NOT NULL,
                    url TEXT NOT NULL,
                    verdict TEXT NOT NULL,
                    reviewer TEXT NOT NULL,
                    created_at TEXT NOT NULL,
                    PRIMARY KEY (run_id, description, timestamp, url, reviewer)
                );
                """
            )

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self._path, timeout=30)
        conn.row_factory = sqlite3.Row
        return conn

    def upsert_pledge(self, pledge: Pledge):
        with self._connect() as conn:
            conn.execute(
                "INSERT OR IGNORE INTO pledges VALUES (?, ?, ?, ?, ?, ?)",
                (
                    pledge.id,
                    pledge.speaker,
                    pledge.date_made.isoformat(),
                    pledge.geo_scope,
                    pledge.claim,
                    _now(),
                ),
            )

    def list_pledges(self) -> list[Pledge]:
        with self._connect() as conn:
            rows = conn.execute("SELECT * FROM pledges ORDER BY created_at, pledge_id").fetchall()
        return [
            Pledge(
                speaker=r["speaker"],
                date_made=date.fromisoformat(r["date_made"]),
                geo_scope=r["geo_scope"],
                claim=r["claim"],
                id=r["pledge_id"],
            )
            for r in rows
        ]

    def insert_run(self, record: RunRecord):
        with self._connect() as conn:
            conn.execute(
                "INSERT INTO runs (run_id, pledge_id, pledge_json, range_start, range_end, "
                "options_json, status, created_at, error, artifacts_json) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    record.run_id,
                    record.pledge.id,
                    json.dumps(_pledge_dict(record.pledge)),
                    record.range.start.isoformat(),
                    record.range.end.isoformat(),
                    json.dumps(record.options),
                    record.status,
                    record.created_at,
                    record.error,
                    json.dumps(record.artifacts),
                ),
            )

    def set_status(self, run_id: str, status: str, error: str | None = None):
        with self._connect() as conn:
            conn.execute(
                "UPDATE runs SET status = ?, error = ? WHERE run_id = ?",
                (status, error, run_id),
            )

    def set_artifacts(self, run_id: str, artifacts: dict):
        with self._connect() as conn:
            conn.execute(
                "UPDATE runs SET artifacts_json = ? WHERE run_id = ?",
                (json.dumps(artifacts), run_id),
            )

    def get_run(self, run_id: str) -> RunRecord:
        with self._connect() as conn:
            row = conn.execute("SELECT * FROM runs WHERE run_id = ?", (run_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"run {run_id!r} not found")
        pledge_raw = json.loads(row["pledge_json"])
        pledge = Pledge(
            speaker=pledge_raw["speaker"],
            date_made=date.fromisoformat(pledge_raw["date_made"]),
            geo_scope=pledge_raw["geo_scope"],
            claim=pledge_raw["claim"],
            id=pledge_raw["id"],
        )
        return RunRecord(
            run_id=row["run_id"],
            pledge=pledge,
            range=MonitoringRange(
                start=date.fromisoformat(row["range_start"]),
                end=date.fromisoformat(row["range_end"]),
            ),
            status=row["status"],
            created_at=row["created_at"],
            options=json.loads(row["options_json"]),
            artifacts=json.loads(row["artifacts_json"]),
            error=row["error"],
        )

    def runs_for_pledge(self, pledge_id: str) -> list[RunRecord]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT run_id FROM runs WHERE pledge_id = ? ORDER BY created_at", (pledge_id,)
            ).fetchall()
        return [self.get_run(r["run_id"]) for r in rows]

    def upsert_feedback(self, record: FeedbackRecord):
        with self._connect() as conn:
            conn.execute(
                "INSERT INTO feedback VALUES (?, ?, ?, ?, ?, ?, ?) "
                "ON CONFLICT(run_id, description, timestamp, url, reviewer) "
                "DO UPDATE SET verdict = excluded.verdict, created_at = excluded.created_at",
                (
                    record.run_id,
                    record.description,
                    record.timestamp,
                    record.url,
                    record.verdict,
                    record.reviewer,
                    record.created_at,
                ),
            )

    def feedback_for_run(self, run_id: str) -> list[FeedbackRecord]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM feedback WHERE run_id = ? ORDER BY description, reviewer",
                (run_id,),
            ).fetchall()
        return [
            FeedbackRecord(
                run_id=r["run_id"],
                description=r["description"],
                timestamp=r["timestamp"],
                url=r["url"],
                verdict=r["verdict"],
                reviewer=r["reviewer"],
                created_at=r["created_at"],
            )
            for r in rows
        ]

    def all_feedback(self) -> list[FeedbackRecord]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT * FROM feedback ORDER BY run_id, description, reviewer"
            ).fetchall()
        return [
            FeedbackRecord(
                run_id=r["run_id"],
                description=r["description"],
                timestamp=r["timestamp"],
                url=r["url"],
                verdict=r["verdict"],
                reviewer=r["reviewer"],
                created_at=r["created_at"],
            )
            for r in rows
        ]


def _pledge_dict(pledge: Pledge) -> dict:
    return {
        "id": pledge.id,
        "speaker": pledge.speaker,
        "date_made": pledge.date_made.isoformat(),
        "geo_scope": pledge.geo_scope,
        "claim": pledge.claim,
    }


def feedback_to_instance(record: FeedbackRecord, pledge: Pledge) -> AnnotatedInstance:
    """Reviewer verdicts feed future ICL pools as labelled instances."""
    label = DECISION_NOT_USEFUL if record.verdict == VERDICT_NOT_RELEVANT else DECISION_USEFUL
    return AnnotatedInstance(
        pledge=pledge,
        event=record.description,
        timestamp=normalize_timestamp(record.timestamp),
        source_url=record.url,
        label=label,
    )


class PledgeService:
    """Facade over the store, the matcher index, and pipeline execution."""

    def __init__(
        self,
        data_dir: str | Path,
        providers: Providers,
        corpus_path: str | Path | None = None,
        max_concurrent_runs: int = 2,
        default_order: str = ORDER_REVERSE,
        match_threshold: float = MATCH_THRESHOLD,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.store = RunStore(self.data_dir / "store.sqlite3")
        self.providers = providers
        self.default_order = default_order
        self.match_threshold = match_threshold
        self._executor = ThreadPoolExecutor(max_workers=max_concurrent_runs)
        self._corpus: list[AnnotatedInstance] = []
        if corpus_path:
            self._corpus, _ = load_annotated_corpus(corpus_path)
        self._index: PledgeIndex = build_index(self.store.list_pledges())

    def close(self):
        self._executor.shutdown(wait=True)

    # -- pledge matching ---------------------------------------------------

    def _rebuild_index(self):
        self._index = build_index(self.store.list_pledges())
        self._index.save(self.data_dir / "pledge_index.json")

    def suggest_pledges(self, claim: str, top_k: int = 5) -> list[dict]:
        if not claim.strip():
            raise ValidationError("claim", "must be non-empty")
        pledges = {p.id: p for p in self.store.list_pledges()}
        suggestions = []
        for pledge_id, score in suggest_similar(self._index, claim, top_k) if self._index.entries else []:
            pledge = pledges[pledge_id]
            suggestions.append(
                {
                    "pledge_id": pledge_id,
                    "claim": pledge.claim,
                    "speaker": pledge.speaker,
                    "date_made": pledge.date_made.isoformat(),
                    "score": score,
                    "match": score >= self.match_threshold,
                }
            )
        return suggestions

    # -- runs ----------------------------------------------------------------

    def create_run(
        self,
        speaker: str,
        date_made: str,
        geo_scope: str,
        claim: str,
        range_start: str,
        range_end: str,
        keep_all: bool = True,
        order: str | None = None,
        seed: int = 0,
        reuse_from_run_id: str | None = None,
    ) -> str:
        pledge = validate_pledge(speaker, date_made, geo_scope, claim)
        try:
            date_range = MonitoringRange(
                start=date.fromisoformat(str(range_start)), end=date.fromisoformat(str(range_end))
            )
        except ValueError as exc:
            raise ValidationError("range", f"invalid date in range: {exc}") from exc
        order = order or self.default_order
        if order not in (ORDER_CHRONOLOGICAL, ORDER_REVERSE):
            raise ValidationError("order", f"unknown order {order!r}")

        reused_round1 = None
        if reuse_from_run_id:
            reused_round1 = self._reusable_round1(reuse_from_run_id, pledge, date_range)

        run_id = f"r{uuid.uuid4().hex[:12]}"
        record = RunRecord(
            run_id=run_id,
            pledge=pledge,
            range=date_range,
            status=STATUS_QUEUED,
            created_at=_now(),
            options={
                "keep_all": keep_all,
                "order": order,
                "seed": seed,
                "reuse_from_run_id": reuse_from_run_id,
            },
        )
        self.store.upsert_pledge(pledge)
        self.store.insert_run(record)
        self._rebuild_index()
        self._executor.submit(self._execute, run_id, reused_round1)
        return run_id

    def _reusable_round1(
        self, source_run_id: str, pledge: Pledge, date_range: MonitoringRange
    ) -> dict[str, list[SearchHit]]:
        source = self.store.get_run(source_run_id)
        score = 0.0
        if self._index.entries:
            scores = {pid: s for pid, s in suggest_similar(self._index, pledge.claim, top_k=10)}
            score = scores.get(source.pledge.id, 0.0)
        if pledge.id != source.pledge.id and score < self.match_threshold:
            raise ValidationError(
                "reuse_from_run_id",
                f"run {source_run_id} tracks a different pledge (similarity {score:.2f})",
            )
        if not date_range.overlaps(source.range):
            raise ValidationError(
                "reuse_from_run_id", "cached run's range does not overlap the new request"
            )
        query_log_path = source.artifacts.get("query_log")
        if not query_log_path or not Path(query_log_path).exists():
            raise ValidationError("reuse_from_run_id", "cached run has no query log to reuse")
        reused: dict[str, list[SearchHit]] = {}
        for line in Path(query_log_path).read_text(encoding="utf-8").splitlines():
            entry = json.loads(line)
            if entry.get("round") != 1:
                continue
            reused[entry["query"]] = [
                SearchHit(url=h["url"], title="", snippet="", rank=h["rank"])
                for h in entry.get("hits", [])
            ]
        return reused

    def _execute(self, run_id: str, reused_round1: dict[str, list[SearchHit]] | None):
        record = self.store.get_run(run_id)

        def on_stage(stage: str):
            self.store.set_status(run_id, _STAGE_TO_STATUS.get(stage, stage))

        try:
            options = PipelineOptions(
                keep_all=bool(record.options.get("keep_all", True)),
                order=record.options.get("order", self.default_order),
                seed=int(record.options.get("seed", 0)),
            )
            result = execute_pipeline(
                record.pledge,
                record.range,
                self.providers,
                options,
                corpus=self._corpus,
                feedback=self.feedback_instances(),
                on_stage=on_stage,
                reused_round1=reused_round1,
            )
            artifacts = write_run_artifacts(result, self.data_dir / "runs" / run_id)
            self.store.set_artifacts(run_id, artifacts)
            self.store.set_status(run_id, STATUS_DONE)
        except Exception as exc:  # noqa: BLE001 - a failed run must land in the store
            self.store.set_status(run_id, STATUS_FAILED, error=f"{type(exc).__name__}: {exc}")

    def get_run(self, run_id: str) -> dict:
        record = self.store.get_run(run_id)
        payload = {
            "run_id": record.run_id,
            "status": record.status,
            "created_at": record.created_at,
            "pledge": _pledge_dict(record.pledge),
            "range": {
                "start": record.range.start.isoformat(),
                "end": record.range.end.isoformat(),
            },
            "options": record.options,
            "error": record.error,
        }
        if record.status == STATUS_DONE:
            timeline_path = record.artifacts.get("timeline")
            if timeline_path and Path(timeline_path).exists():
                payload["timeline"] = json.loads(Path(timeline_path).read_text(encoding="utf-8"))
        return payload

    def wait_for_run(self, run_id: str, timeout: float = 60.0) -> dict:
        """Poll until the run reaches a terminal state; test/CLI convenience."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            payload = self.get_run(run_id)
            if payload["status"] in (STATUS_DONE, STATUS_FAILED):
                return payload
            time.sleep(0.05)
        raise TimeoutError(f"run {run_id} still active after {timeout}s")

    # -- events & feedback ---------------------------------------------------

    def run_events(self, run_id: str) -> list[dict]:
        record = self.store.get_run(run_id)
        candidates_path = record.artifacts.get("candidates")
        if record.status != STATUS_DONE or not candidates_path:
            return []
        rows = [
            json.loads(line)
            for line in Path(candidates_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        feedback = self.store.feedback_for_run(run_id)
        by_key: dict[tuple[str, str, str], list[dict]] = {}
        for fb in feedback:
            by_key.setdefault((fb.description, fb.timestamp, fb.url), []).append(
                {"reviewer": fb.reviewer, "verdict": fb.verdict}
            )
        for row in rows:
            key = (row["description"], row["date"], row["source_url"])
            row["feedback"] = by_key.get(key, [])
        return rows

    def record_feedback(
        self, run_id: str, description: str, timestamp: str, url: str, verdict: str, reviewer: str
    ) -> FeedbackRecord:
        if verdict not in VERDICTS:
            raise ValidationError("verdict", f"must be one of {', '.join(VERDICTS)}")
        if not reviewer.strip():
            raise ValidationError("reviewer", "must be non-empty")
        record = self.store.get_run(run_id)
        if record.status != STATUS_DONE:
            raise ValidationError("run_id", f"run {run_id} is not done (status {record.status})")
        known = {
            (row["description"], row["date"], row["source_url"])
            for row in self.run_events(run_id)
        }
        if (description, timestamp, url) not in known:
            raise NotFoundError("event key not found in this run's candidate set")
        feedback = FeedbackRecord(
            run_id=run_id,
            description=description,
            timestamp=timestamp,
            url=url,
            verdict=verdict,
            reviewer=reviewer.strip(),
            created_at=_now(),
        )
        self.store.upsert_feedback(feedback)
        return feedback

    def feedback_instances(self, pledge_id: str | None = None) -> list[AnnotatedInstance]:
        """Feedback store viewed as annotated instances for ICL selection."""
        instances = []
        for record in self.store.all_feedback():
            run = self.store.get_run(record.run_id)
            if pledge_id is not None and run.pledge.id != pledge_id:
                continue
            instances.append(feedback_to_instance(record, run.pledge))
        return instances


def create_app(service: PledgeService):
    """FastAPI application over a configured :class:`PledgeService`."""
    from fastapi import Body, FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="pledgewatch", version="0.1.0")

    def error_response(status: int, code: str, message: str, fieldname: str | None = None):
        body = {"code": code, "message": message}
        if fieldname:
            body["field"] = fieldname
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ValidationError)
    async def handle_validation(_request, exc: ValidationError):
        return error_response(400, "validation_error", str(exc), exc.field)

    @app.exception_handler(NotFoundError)
    async def handle_not_found(_request, exc: NotFoundError):
        return error_response(404, "not_found", str(exc))

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/runs", status_code=202)
    async def create_run(payload: dict = Body(...)):
        options = payload.get("options", {}) or {}
        run_id = service.create_run(
            speaker=payload.get("speaker", ""),
            date_made=payload.get("date_made", ""),
            geo_scope=payload.get("geo_scope", ""),
            claim=payload.get("claim", ""),
            range_start=(payload.get("range") or {}).get("start", ""),
            range_end=(payload.get("range") or {}).get("end", ""),
            keep_all=bool(options.get("keep_all", True)),
            order=options.get("order"),
            seed=int(options.get("seed", 0)),
            reuse_from_run_id=options.get("reuse_from_run_id"),
        )
        return {"run_id": run_id, "status": STATUS_QUEUED}

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str):
        return service.get_run(run_id)

    @app.get("/runs/{run_id}/events")
    async def get_events(run_id: str):
        service.store.get_run(run_id)  # 404 for unknown runs
        return {"events": service.run_events(run_id)}

    @app.post("/runs/{run_id}/feedback", status_code=201)
    async def post_feedback(run_id: str, payload: dict = Body(...)):
        record = service.record_feedback(
            run_id=run_id,
            description=payload.get("description", ""),
            timestamp=payload.get("timestamp", ""),
            url=payload.get("url", ""),
            verdict=payload.get("verdict", ""),
            reviewer=payload.get("reviewer", ""),
        )
        return {
            "run_id": record.run_id,
            "verdict": record.verdict,
            "reviewer": record.reviewer,
            "created_at": record.created_at,
        }

    @app.get("/pledges/similar")
    async def pledges_similar(claim: str, k: int = 5):
        return {"suggestions": service.suggest_pledges(claim, top_k=k)}

    return app
