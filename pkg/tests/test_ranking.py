import math
import random

from pledgewatch.ranking import BM25
from pledgewatch.textutil import tokenize


def bm25_oracle_scores(documents, query, k1=1.2, b=0.75):
    """Direct-formula implementation, independent of the BM25 class internals."""
    docs_tokens = [tokenize(d) for d in documents]
    query_tokens = tokenize(query)
    n = len(docs_tokens)
    avgdl = sum(len(d) for d in docs_tokens) / n
    scores = []
    for tokens in docs_tokens:
        score = 0.0
        for term in query_tokens:
            tf = tokens.count(term)
            if tf == 0:
                continue
            df = sum(1 for d in docs_tokens if term in d)
            idf = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len(tokens) / avgdl))
        scores.append(score)
    return scores


def synthetic_corpus(n_docs=20, seed=3):
    rng = random.Random(seed)
    vocab = ["hunt", "trail", "ban", "act", "law", "court", "fox", "dog", "land", "rural"]
    docs = []
    for _ in range(n_docs):
        length = rng.randrange(5, 15)
        docs.append(" ".join(rng.choice(vocab) for _ in range(length)))
    return docs


def test_bm25_matches_brute_force_oracle_on_twenty_docs():
    documents = synthetic_corpus()
    query = "trail hunt ban court"
    index = BM25(documents)
    expected = bm25_oracle_scores(documents, query)
    actual = [index.score(query, i) for i in range(len(documents))]
    for got, want in zip(actual, expected):
        assert abs(got - want) < 1e-9
    expected_order = sorted(range(len(documents)), key=lambda i: (-expected[i], i))
    assert [i for i, _ in index.rank(query)] == expected_order


def test_single_matching_sentence_ranks_first():
    documents = ["nothing relevant here", "the ban on trail hunting", "other words entirely"]
    index = BM25(documents)
    assert index.rank("trail hunting")[0][0] == 1


def test_absent_terms_score_zero_and_keep_source_order():
    documents = ["alpha beta", "gamma delta", "epsilon zeta"]
    index = BM25(documents)
    ranked = index.rank("missing")
    assert [i for i, _ in ranked] == [0, 1, 2]
    assert all(score == 0.0 for _, score in ranked)


def test_scores_non_negative_and_monotone_in_tf():
    # Same document length, increasing query-term frequency.
    previous = -1.0
    for tf in range(1, 6):
        doc = " ".join(["hunt"] * tf + ["filler"] * (10 - tf))
        index = BM25([doc])
        score = index.score("hunt", 0)
        assert score >= 0.0
        assert score > previous
        previous = score


def test_repeated_query_terms_accumulate():
    index = BM25(["trail hunting ban", "unrelated text here"])
    assert index.score("ban ban", 0) == 2 * index.score("ban", 0)


def test_rank_truncates_to_top_k():
    documents = synthetic_corpus(10)
    index = BM25(documents)
    assert len(index.rank("hunt", top_k=3)) == 3
