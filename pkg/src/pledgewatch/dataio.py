"""File formats shared by the CLI, service, and evaluation harness.

Annotated corpus: JSON lines, one instance per line:
    {"pledge": {"speaker", "date_made", "geo_scope", "claim", "id"?},
     "event", "timestamp", "url", "label"}
Predictions: JSON lines {"instance_id", "label"}.
Judgments: CSV with header request_id,system,url,judged_useful.
Split map: JSON object {instance_id: "train"|"dev"|"test"}.
"""

from __future__ import annotations

import json
from pathlib import Path

from .domain import AnnotatedInstance, validate_pledge
from .errors import InputFileError, NormalizationError, ValidationError
from .evalharness import RetrievalJudgment
from .temporal import normalize_timestamp


def dump_json(data, path: str | Path):
    text = json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def dump_jsonl(rows: list[dict], path: str | Path):
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


def load_annotated_corpus(path: str | Path) -> tuple[list[AnnotatedInstance], list[str]]:
    """Read instances plus their ids (the "id" field or a positional id)."""
    instances: list[AnnotatedInstance] = []
    ids: list[str] = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputFileError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        try:
            instances.append(parse_instance(row))
        except (KeyError, ValidationError, NormalizationError, TypeError) as exc:
            raise InputFileError(f"invalid instance: {exc}", line=line_no) from exc
        ids.append(str(row.get("id") or f"i{line_no:06d}"))
    return instances, ids


def parse_instance(row: dict) -> AnnotatedInstance:
    pledge_row = row["pledge"]
    pledge = validate_pledge(
        speaker=pledge_row["speaker"],
        date_made=pledge_row["date_made"],
        geo_scope=pledge_row.get("geo_scope", ""),
        claim=pledge_row["claim"],
        pledge_id=pledge_row.get("id"),
    )
    label = row["label"]
    if label not in ("useful", "not_useful"):
        raise ValidationError("label", f"must be useful/not_useful, got {label!r}")
    return AnnotatedInstance(
        pledge=pledge,
        event=row["event"],
        timestamp=normalize_timestamp(row["timestamp"]),
        source_url=row["url"],
        label=label,
    )


def load_predictions(path: str | Path) -> list[tuple[str, str]]:
    predictions = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = json.loads(line)
            predictions.append((str(row["instance_id"]), str(row["label"])))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputFileError(f"invalid prediction row: {exc}", line=line_no) from exc
    return predictions


_TRUE_VALUES = {"true", "1", "yes", "y", "t"}
_FALSE_VALUES = {"false", "0", "no", "n", "f"}


def load_judgments_csv(path: str | Path) -> list[RetrievalJudgment]:
    import csv

    judgments = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"request_id", "system", "url", "judged_useful"}
        if not reader.fieldnames or not required.issubset(set(reader.fieldnames)):
            raise InputFileError(
                f"judgments CSV must have header request_id,system,url,judged_useful", line=1
            )
        for line_no, row in enumerate(reader, start=2):
            raw = (row.get("judged_useful") or "").strip().lower()
            if raw in _TRUE_VALUES:
                judged = True
            elif raw in _FALSE_VALUES:
                judged = False
            else:
                raise InputFileError(f"judged_useful must be boolean, got {raw!r}", line=line_no)
            if not (row.get("request_id") and row.get("system") and row.get("url")):
                raise InputFileError("request_id, system, and url are required", line=line_no)
            judgments.append(
                RetrievalJudgment(
                    request_id=row["request_id"].strip(),
                    system_name=row["system"].strip(),
                    url=row["url"].strip(),
                    judged_useful=judged,
                )
            )
    return judgments


def load_split_map(path: str | Path) -> dict[str, str]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputFileError(f"invalid JSON split map: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise InputFileError("split map must be a JSON object of instance_id -> split")
    return {str(k): str(v) for k, v in data.items()}
