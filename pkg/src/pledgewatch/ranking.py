"""BM25 scoring over small in-memory corpora.

Used twice: ranking candidate evidence sentences against search queries,
and picking the closest question-evidence seed pairs for prompting.
Parameters follow the common defaults k1=1.2, b=0.75 with a smoothed
natural-log IDF that never goes negative.
"""

from __future__ import annotations

import math
from collections import Counter

from .textutil import tokenize


class BM25:
    def __init__(self, documents: list[str], k1: float = 1.2, b: float = 0.75):
        self.k1 = k1
        self.b = b
        self._term_freqs = [Counter(tokenize(doc)) for doc in documents]
        self._doc_lens = [sum(tf.values()) for tf in self._term_freqs]
        n = len(documents)
        self._avgdl = sum(self._doc_lens) / n if n else 0.0
        df: Counter = Counter()
        for tf in self._term_freqs:
            df.update(tf.keys())
        # ln((N - df + 0.5) / (df + 0.5) + 1): the +1 keeps IDF positive
        # even for terms present in every document.
        self._idf = {
            term: math.log((n - d + 0.5) / (d + 0.5) + 1.0) for term, d in df.items()
        }

    def score(self, query: str, index: int) -> float:
        """Score one document against the query; repeated query terms add up."""
        tf = self._term_freqs[index]
        doc_len = self._doc_lens[index]
        score = 0.0
        for term in tokenize(query):
            if term not in tf:
                continue
            freq = tf[term]
            norm = freq + self.k1 * (1.0 - self.b + self.b * doc_len / self._avgdl)
            score += self._idf[term] * freq * (self.k1 + 1.0) / norm
        return score

    def rank(self, query: str, top_k: int | None = None) -> list[tuple[int, float]]:
        """Indices with scores, best first; ties keep source order."""
        scored = [(i, self.score(query, i)) for i in range(len(self._term_freqs))]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored[:top_k] if top_k is not None else scored
