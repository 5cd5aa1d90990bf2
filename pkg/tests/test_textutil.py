import json
from pathlib import Path

import pytest

from pledgewatch.textutil import noun_phrases, split_sentences, tokenize

ORACLE = json.loads(
    (Path(__file__).parent / "data" / "noun_phrase_oracle.json").read_text(encoding="utf-8")
)


def test_tokenize_lowercases_and_splits_alnum():
    assert tokenize("Ban Trail-Hunting in 2024!") == ["ban", "trail", "hunting", "in", "2024"]
    assert tokenize("") == []


@pytest.mark.parametrize("case", ORACLE, ids=[c["sentence"][:30] for c in ORACLE])
def test_noun_phrases_match_hand_tagged_oracle(case):
    assert noun_phrases(case["sentence"]) == case["chunks"]


def test_noun_phrases_empty_input():
    assert noun_phrases("") == []
    assert noun_phrases("   ") == []


def test_noun_phrases_dedup_preserves_first_appearance():
    chunks = noun_phrases("Trail hunting, trail hunting, and trail hunting")
    assert chunks == ["trail hunting"]


def test_noun_phrases_drop_stopword_only_chunks():
    # "the other" is determiner + stopword; must not surface as a phrase
    assert "the other" not in noun_phrases("We want the other one and the other")


def test_split_sentences_basic():
    text = "First sentence. Second one! Third?"
    assert split_sentences(text) == ["First sentence.", "Second one!", "Third?"]


def test_split_sentences_guards_abbreviations():
    text = "Dr. Smith met Mr. Jones on Jan. 5 and they spoke. A deal followed."
    sentences = split_sentences(text)
    assert sentences == ["Dr. Smith met Mr. Jones on Jan. 5 and they spoke.", "A deal followed."]


def test_split_sentences_guards_initials():
    text = "The case was brought by J. Doe against the council. It was dismissed."
    assert split_sentences(text) == [
        "The case was brought by J. Doe against the council.",
        "It was dismissed.",
    ]


def test_split_sentences_keeps_tail_without_terminal_punctuation():
    assert split_sentences("No terminal punctuation here") == ["No terminal punctuation here"]


def test_split_sentences_empty():
    assert split_sentences("") == []
