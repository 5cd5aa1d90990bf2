import json

import pytest
from fastapi.testclient import TestClient

from conftest import FIXTURE_WORLD, load_golden
from pledgewatch.providers.config import ProviderSettings, make_providers
from pledgewatch.service import PledgeService, create_app

RUN_PAYLOAD = {
    "speaker": "Labour",
    "date_made": "2024-07-04",
    "geo_scope": "UK",
    "claim": "We will ban trail hunting",
    "range": {"start": "2024-07-05", "end": "2024-09-30"},
    "options": {"keep_all": True, "order": "reverse_chronological", "seed": 0},
}


@pytest.fixture
def service(tmp_path):
    providers = make_providers(
        ProviderSettings(mode="fixture", fixtures_dir=str(FIXTURE_WORLD))
    )
    service = PledgeService(
        data_dir=tmp_path / "data",
        providers=providers,
        corpus_path=FIXTURE_WORLD / "annotations.jsonl",
    )
    yield service
    service.close()


@pytest.fixture
def client(service):
    return TestClient(create_app(service))


def _run_to_done(service, client, payload=RUN_PAYLOAD):
    response = client.post("/runs", json=payload)
    assert response.status_code == 202, response.text
    run_id = response.json()["run_id"]
    final = service.wait_for_run(run_id, timeout=60)
    return run_id, final


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_create_run_returns_queued_id(service, client):
    response = client.post("/runs", json=RUN_PAYLOAD)
    assert response.status_code == 202
    body = response.json()
    assert body["run_id"].startswith("r")
    assert body["status"] == "queued"
    service.wait_for_run(body["run_id"])


def test_run_reaches_done_with_golden_timeline(service, client):
    run_id, final = _run_to_done(service, client)
    assert final["status"] == "done", final.get("error")
    assert final["timeline"] == load_golden("timeline_review.json")
    payload = client.get(f"/runs/{run_id}").json()
    assert payload["status"] == "done"
    assert payload["timeline"] == load_golden("timeline_review.json")


def test_run_rerun_is_deterministic(service, client):
    _, first = _run_to_done(service, client)
    _, second = _run_to_done(service, client)
    assert first["timeline"] == second["timeline"]


def test_invalid_range_is_400_with_field(client):
    payload = dict(RUN_PAYLOAD, range={"start": "2024-10-01", "end": "2024-07-05"})
    response = client.post("/runs", json=payload)
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "validation_error"
    assert body["field"] == "range"


def test_empty_claim_is_400_naming_field(client):
    payload = dict(RUN_PAYLOAD, claim="  ")
    response = client.post("/runs", json=payload)
    assert response.status_code == 400
    assert response.json()["field"] == "claim"


def test_unknown_run_is_404(client):
    response = client.get("/runs/rdoesnotexist")
    assert response.status_code == 404
    assert response.json()["code"] == "not_found"


def test_events_listing_includes_all_candidates(service, client):
    run_id, _ = _run_to_done(service, client)
    events = client.get(f"/runs/{run_id}/events").json()["events"]
    golden = load_golden("candidates.json")
    assert len(events) == len(golden) == 8
    assert all(row["feedback"] == [] for row in events)
    assert {row["description"] for row in events} == {row["description"] for row in golden}


def test_feedback_upsert_and_view(service, client):
    run_id, _ = _run_to_done(service, client)
    event = client.get(f"/runs/{run_id}/events").json()["events"][0]
    key = {
        "description": event["description"],
        "timestamp": event["date"],
        "url": event["source_url"],
    }
    first = client.post(
        f"/runs/{run_id}/feedback",
        json=dict(key, verdict="relevant_update", reviewer="nasim"),
    )
    assert first.status_code == 201
    second = client.post(
        f"/runs/{run_id}/feedback",
        json=dict(key, verdict="not_relevant", reviewer="nasim"),
    )
    assert second.status_code == 201

    rows = client.get(f"/runs/{run_id}/events").json()["events"]
    row = next(r for r in rows if r["description"] == event["description"])
    assert row["feedback"] == [{"reviewer": "nasim", "verdict": "not_relevant"}]

    instances = service.feedback_instances()
    assert len(instances) == 1
    assert instances[0].label == "not_useful"
    assert instances[0].event == event["description"]


def test_feedback_verdict_mapping_to_useful(service, client):
    run_id, _ = _run_to_done(service, client)
    event = client.get(f"/runs/{run_id}/events").json()["events"][1]
    client.post(
        f"/runs/{run_id}/feedback",
        json={
            "description": event["description"],
            "timestamp": event["date"],
            "url": event["source_url"],
            "verdict": "relevant_seen",
            "reviewer": "josh",
        },
    )
    instances = service.feedback_instances()
    assert instances[0].label == "useful"


def test_feedback_on_fabricated_event_is_404(service, client):
    run_id, _ = _run_to_done(service, client)
    response = client.post(
        f"/runs/{run_id}/feedback",
        json={
            "description": "made up event",
            "timestamp": "2024-08-01",
            "url": "https://example.org/fake",
            "verdict": "relevant_seen",
            "reviewer": "josh",
        },
    )
    assert response.status_code == 404


def test_feedback_invalid_verdict_is_400(service, client):
    run_id, _ = _run_to_done(service, client)
    event = client.get(f"/runs/{run_id}/events").json()["events"][0]
    response = client.post(
        f"/runs/{run_id}/feedback",
        json={
            "description": event["description"],
            "timestamp": event["date"],
            "url": event["source_url"],
            "verdict": "thumbs_up",
            "reviewer": "josh",
        },
    )
    assert response.status_code == 400
    assert response.json()["field"] == "verdict"


def test_pledge_suggestions_exact_match(service, client):
    _run_to_done(service, client)
    response = client.get(
        "/pledges/similar", params={"claim": "We will ban trail hunting", "k": 3}
    )
    suggestions = response.json()["suggestions"]
    assert suggestions
    assert suggestions[0]["score"] == pytest.approx(1.0)
    assert suggestions[0]["match"] is True
    assert suggestions[0]["claim"] == "We will ban trail hunting"


def test_pledge_suggestions_empty_store(client):
    response = client.get("/pledges/similar", params={"claim": "anything at all"})
    assert response.json()["suggestions"] == []


def test_reuse_cached_round1(service, client):
    first_run_id, _ = _run_to_done(service, client)
    payload = dict(RUN_PAYLOAD, options=dict(RUN_PAYLOAD["options"], reuse_from_run_id=first_run_id))
    second_run_id, final = _run_to_done(service, client, payload)
    assert final["status"] == "done", final.get("error")
    assert final["timeline"] == load_golden("timeline_review.json")

    record = service.store.get_run(second_run_id)
    log_path = record.artifacts["query_log"]
    entries = [json.loads(line) for line in open(log_path, encoding="utf-8")]
    round1 = [e for e in entries if e["round"] == 1]
    assert round1 and all(e.get("reused") for e in round1)


def test_reuse_rejected_for_non_overlapping_range(service, client):
    first_run_id, _ = _run_to_done(service, client)
    payload = dict(
        RUN_PAYLOAD,
        range={"start": "2025-01-01", "end": "2025-02-01"},
        options=dict(RUN_PAYLOAD["options"], reuse_from_run_id=first_run_id),
    )
    response = client.post("/runs", json=payload)
    assert response.status_code == 400
    assert response.json()["field"] == "reuse_from_run_id"


def test_reuse_rejected_for_dissimilar_pledge(service, client):
    first_run_id, _ = _run_to_done(service, client)
    payload = dict(
        RUN_PAYLOAD,
        claim="We will nationalise the railways",
        options=dict(RUN_PAYLOAD["options"], reuse_from_run_id=first_run_id),
    )
    response = client.post("/runs", json=payload)
    assert response.status_code == 400


def test_failed_run_records_error(tmp_path):
    # A world with search hits and pages but no completions: extraction will
    # find no fixture and the run must land in failed with an error message.
    world = tmp_path / "world"
    world.mkdir()
    source = json.loads((FIXTURE_WORLD / "queries.json").read_text(encoding="utf-8"))
    (world / "queries.json").write_text(json.dumps(source), encoding="utf-8")
    (world / "pages.json").write_text(
        (FIXTURE_WORLD / "pages.json").read_text(encoding="utf-8"), encoding="utf-8"
    )
    (world / "completions.json").write_text("{}", encoding="utf-8")
    providers = make_providers(ProviderSettings(mode="fixture", fixtures_dir=str(world)))
    service = PledgeService(data_dir=tmp_path / "data", providers=providers)
    try:
        run_id = service.create_run(
            speaker="Labour",
            date_made="2024-07-04",
            geo_scope="UK",
            claim="We will ban trail hunting",
            range_start="2024-07-05",
            range_end="2024-09-30",
        )
        final = service.wait_for_run(run_id, timeout=60)
        assert final["status"] == "failed"
        assert final["error"]
        assert "timeline" not in final
    finally:
        service.close()


def test_status_transitions_reach_done_in_order(service):
    run_id = service.create_run(
        speaker="Labour",
        date_made="2024-07-04",
        geo_scope="UK",
        claim="We will ban trail hunting",
        range_start="2024-07-05",
        range_end="2024-09-30",
    )
    import time

    seen = []
    deadline = time.monotonic() + 60
    while time.monotonic() < deadline:
        status = service.get_run(run_id)["status"]
        if not seen or seen[-1] != status:
            seen.append(status)
        if status in ("done", "failed"):
            break
        time.sleep(0.005)
    assert seen[-1] == "done"
    order = ["queued", "retrieving", "extracting", "filtering", "done"]
    positions = [order.index(s) for s in seen]
    assert positions == sorted(positions)
