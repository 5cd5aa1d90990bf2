"""TF-IDF similarity between a new pledge claim and previously tracked ones.

A confirmed match lets the engine reuse cached round-1 search results and
pick ICL examples annotated for that same pledge.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .domain import Pledge
from .textutil import STOPWORDS, tokenize

# Suggestions at or above this score count as a match; reuse still needs
# explicit user confirmation.
MATCH_THRESHOLD = 0.8


@dataclass(frozen=True)
class IndexEntry:
    pledge_id: str
    claim: str
    vector: dict[str, float]


@dataclass
class PledgeIndex:
    entries: list[IndexEntry]
    vocabulary: dict[str, int]
    idf: dict[str, float]
    doc_count: int

    def to_json_dict(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "vocabulary": self.vocabulary,
            "idf": self.idf,
            "entries": [
                {"pledge_id": e.pledge_id, "claim": e.claim, "vector": e.vector}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PledgeIndex":
        return cls(
            entries=[
                IndexEntry(pledge_id=e["pledge_id"], claim=e["claim"], vector=e["vector"])
                for e in data["entries"]
            ],
            vocabulary=data["vocabulary"],
            idf=data["idf"],
            doc_count=data["doc_count"],
        )

    def save(self, path: str | Path):
        Path(path).write_text(
            json.dumps(self.to_json_dict(), ensure_ascii=False, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "PledgeIndex":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _terms(text: str) -> list[str]:
    return [t for t in tokenize(text) if t not in STOPWORDS]


def _weight_and_normalize(counts: dict[str, int], idf: dict[str, float]) -> dict[str, float]:
    weights = {t: c * idf[t] for t, c in counts.items() if t in idf}
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in weights.items()}


def build_index(pledges: list[Pledge]) -> PledgeIndex:
    """Index claims as L2-normalized tf-idf vectors.

    IDF uses the smoothed form ln((1+N)/(1+df)) + 1 so no term weight is
    ever zero or negative.
    """
    docs = [_terms(p.claim) for p in pledges]
    n = len(docs)
    df: dict[str, int] = {}
    for terms in docs:
        for term in set(terms):
            df[term] = df.get(term, 0) + 1
    idf = {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in df.items()}
    vocabulary = {t: i for i, t in enumerate(sorted(idf))}
    entries = []
    for pledge, terms in zip(pledges, docs):
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        entries.append(
            IndexEntry(
                pledge_id=pledge.id,
                claim=pledge.claim,
                vector=_weight_and_normalize(counts, idf),
            )
        )
    return PledgeIndex(entries=entries, vocabulary=vocabulary, idf=idf, doc_count=n)


def suggest_similar(
    index: PledgeIndex, query_claim: str, top_k: int = 5
) -> list[tuple[str, float]]:
    """(pledge_id, cosine score) pairs, best first; ties order by pledge_id."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if not index.entries:
        return []
    counts: dict[str, int] = {}
    for term in _terms(query_claim):
        counts[term] = counts.get(term, 0) + 1
    query_vector = _weight_and_normalize(counts, index.idf)
    scored = []
    for entry in index.entries:
        score = sum(weight * entry.vector.get(term, 0.0) for term, weight in query_vector.items())
        scored.append((entry.pledge_id, min(1.0, max(0.0, score))))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:top_k]


def best_match(index: PledgeIndex, query_claim: str) -> tuple[str, float] | None:
    """Top suggestion when it clears the match threshold, else None."""
    suggestions = suggest_similar(index, query_claim, top_k=1)
    if suggestions and suggestions[0][1] >= MATCH_THRESHOLD:
        return suggestions[0]
    return None
