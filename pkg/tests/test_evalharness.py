import random

import pytest
from hypothesis import given, strategies as st

from pledgewatch.domain import AnnotatedInstance, validate_pledge
from pledgewatch.errors import InputFileError, SplitPartitionError
from pledgewatch.evalharness import (
    ConfusionCounts,
    RetrievalJudgment,
    filtering_metrics,
    prf,
    retrieval_metrics,
    round_half_up,
    split_stats,
)
from pledgewatch.temporal import normalize_timestamp


def make_instance(pledge, event, label, day="2024-08-01"):
    return AnnotatedInstance(
        pledge=pledge,
        event=event,
        timestamp=normalize_timestamp(day),
        source_url="https://example.org/a",
        label=label,
    )


def test_prf_reconstructed_counts_match_published_arithmetic():
    precision, recall, f1 = prf(ConfusionCounts(tp=112, fp=108, fn=22))
    assert abs(precision - 0.509) <= 0.001
    assert abs(recall - 0.836) <= 0.001
    assert abs(f1 - 0.633) <= 0.001


def test_prf_zero_denominators():
    assert prf(ConfusionCounts()) == (0.0, 0.0, 0.0)
    assert prf(ConfusionCounts(tp=0, fp=3, fn=0)) == (0.0, 0.0, 0.0)


def test_prf_harmonic_mean_case():
    precision, recall, f1 = prf(ConfusionCounts(tp=1, fp=1, fn=0))
    assert precision == 0.5
    assert recall == 1.0
    assert f1 == pytest.approx(2 / 3)


def test_confusion_counts_reject_negative():
    with pytest.raises(ValueError):
        ConfusionCounts(tp=-1)


@given(
    st.integers(min_value=0, max_value=500),
    st.integers(min_value=0, max_value=500),
    st.integers(min_value=0, max_value=500),
)
def test_prf_bounds_property(tp, fp, fn):
    precision, recall, f1 = prf(ConfusionCounts(tp=tp, fp=fp, fn=fn))
    assert 0.0 <= precision <= 1.0
    assert 0.0 <= recall <= 1.0
    assert 0.0 <= f1 <= 1.0
    if precision > 0 and recall > 0:
        assert min(precision, recall) - 1e-12 <= f1 <= max(precision, recall) + 1e-12


def _gold_set(n_useful=5, n_not=5):
    pledge = validate_pledge("Labour", "2024-07-04", "UK", "We will ban trail hunting")
    gold = []
    for i in range(n_useful):
        gold.append(make_instance(pledge, f"useful {i}", "useful"))
    for i in range(n_not):
        gold.append(make_instance(pledge, f"background {i}", "not_useful"))
    ids = [f"g{i}" for i in range(len(gold))]
    return gold, ids


def test_filtering_perfect_predictions():
    gold, ids = _gold_set()
    predictions = [(i, inst.label) for i, inst in zip(ids, gold)]
    assert filtering_metrics(predictions, gold, ids) == (1.0, 1.0, 1.0)


def test_filtering_all_negative_predictions():
    gold, ids = _gold_set()
    predictions = [(i, "not_useful") for i in ids]
    assert filtering_metrics(predictions, gold, ids) == (0.0, 0.0, 0.0)


def test_filtering_missing_predictions_count_as_not_useful():
    gold, ids = _gold_set(n_useful=2, n_not=2)
    predictions = [(ids[0], "useful")]
    precision, recall, f1 = filtering_metrics(predictions, gold, ids)
    assert precision == 1.0
    assert recall == 0.5


def test_filtering_duplicate_ids_rejected():
    gold, ids = _gold_set(1, 1)
    with pytest.raises(InputFileError):
        filtering_metrics([(ids[0], "useful"), (ids[0], "useful")], gold, ids)


def test_filtering_unknown_ids_rejected():
    gold, ids = _gold_set(1, 1)
    with pytest.raises(InputFileError):
        filtering_metrics([("ghost", "useful")], gold, ids)


def test_filtering_random_case_matches_hand_tally():
    rng = random.Random(5)
    pledge = validate_pledge("Labour", "2024-07-04", "UK", "We will ban trail hunting")
    gold, predictions, ids = [], [], []
    tp = fp = fn = 0
    for i in range(50):
        gold_label = rng.choice(["useful", "not_useful"])
        pred_label = rng.choice(["useful", "not_useful"])
        gold.append(make_instance(pledge, f"event {i}", gold_label))
        ids.append(f"r{i}")
        predictions.append((f"r{i}", pred_label))
        # independent tally
        if pred_label == "useful" and gold_label == "useful":
            tp += 1
        elif pred_label == "useful":
            fp += 1
        elif gold_label == "useful":
            fn += 1
    expected_p = tp / (tp + fp) if tp + fp else 0.0
    expected_r = tp / (tp + fn) if tp + fn else 0.0
    expected_f = 2 * expected_p * expected_r / (expected_p + expected_r) if expected_p + expected_r else 0.0
    assert filtering_metrics(predictions, gold, ids) == (expected_p, expected_r, expected_f)


def _two_request_judgments():
    return [
        RetrievalJudgment("A", "ours", "https://example.org/u1", True),
        RetrievalJudgment("A", "ours", "https://example.org/u2", False),
        RetrievalJudgment("B", "ours", "https://example.org/v1", True),
        RetrievalJudgment("B", "other", "https://example.org/v2", True),
    ]


def test_retrieval_two_request_hand_example():
    report = retrieval_metrics(_two_request_judgments(), "ours")
    assert report.pledge_level[0] == pytest.approx(0.75)
    assert report.pledge_level[1] == pytest.approx(0.75)
    assert report.url_level[0] == pytest.approx(2 / 3)
    assert report.url_level[1] == pytest.approx(2 / 3)


def test_retrieval_single_request_perfect():
    judgments = [
        RetrievalJudgment("A", "ours", "https://example.org/u1", True),
        RetrievalJudgment("A", "ours", "https://example.org/u2", True),
    ]
    report = retrieval_metrics(judgments, "ours")
    assert report.pledge_level == (1.0, 1.0, 1.0)
    assert report.url_level == (1.0, 1.0, 1.0)


def test_retrieval_novelty_three_system_pool():
    judgments = [
        RetrievalJudgment("A", "ours", "https://example.org/u1", True),
        RetrievalJudgment("A", "ours", "https://example.org/u3", True),
        RetrievalJudgment("A", "google", "https://example.org/u1", True),
        RetrievalJudgment("A", "google", "https://example.org/u2", False),
        RetrievalJudgment("A", "gpt", "https://example.org/u4", False),
    ]
    ours = retrieval_metrics(judgments, "ours")
    assert ours.novelty == 1  # u3 useful and unique to us; u1 shared with google
    google = retrieval_metrics(judgments, "google")
    assert google.novelty == 0
    gpt = retrieval_metrics(judgments, "gpt")
    assert gpt.novelty == 0
    assert gpt.url_level == (0.0, 0.0, 0.0)


def test_retrieval_absent_system_warns_with_zeros():
    report = retrieval_metrics(_two_request_judgments(), "missing")
    assert report.warning is not None
    assert report.pledge_level == (0.0, 0.0, 0.0)


def test_retrieval_invariant_to_row_order_and_duplicates():
    judgments = _two_request_judgments()
    shuffled = list(reversed(judgments)) + judgments  # duplicates + reordering
    base = retrieval_metrics(judgments, "ours")
    noisy = retrieval_metrics(shuffled, "ours")
    assert base.pledge_level == noisy.pledge_level
    assert base.url_level == noisy.url_level
    assert base.novelty == noisy.novelty


def test_retrieval_url_normalization_pools_variants():
    judgments = [
        RetrievalJudgment("A", "ours", "HTTPS://Example.ORG/u1?utm_source=x", True),
        RetrievalJudgment("A", "other", "https://example.org/u1", True),
    ]
    report = retrieval_metrics(judgments, "ours")
    assert report.url_level == (1.0, 1.0, 1.0)
    assert report.novelty == 0  # same URL after normalization


def test_retrieval_macro_equals_micro_when_counts_identical():
    judgments = []
    for req in ("A", "B", "C"):
        judgments.append(RetrievalJudgment(req, "ours", f"https://example.org/{req}/good", True))
        judgments.append(RetrievalJudgment(req, "ours", f"https://example.org/{req}/bad", False))
        judgments.append(RetrievalJudgment(req, "other", f"https://example.org/{req}/missed", True))
    report = retrieval_metrics(judgments, "ours")
    assert report.pledge_level == pytest.approx(report.url_level)


def test_retrieval_skip_unreturned_requests_flag():
    judgments = _two_request_judgments() + [
        RetrievalJudgment("C", "other", "https://example.org/w1", True)
    ]
    scored = retrieval_metrics(judgments, "ours")
    skipped = retrieval_metrics(judgments, "ours", skip_unreturned_requests=True)
    assert scored.requests_scored == 3
    assert skipped.requests_scored == 2
    assert skipped.pledge_level[0] > scored.pledge_level[0]


def _synthetic_corpus():
    pledges = [
        validate_pledge("Labour", "2024-07-04", "UK", f"synthetic pledge number {i}")
        for i in range(3)
    ]
    corpus, ids, split_map = [], [], {}
    layout = [
        (pledges[0], "train", ["useful", "not_useful", "not_useful", "useful"]),
        (pledges[1], "dev", ["useful", "not_useful"]),
        (pledges[2], "test", ["not_useful", "not_useful", "useful"]),
    ]
    counter = 0
    for pledge, split, labels in layout:
        for label in labels:
            corpus.append(make_instance(pledge, f"event {counter}", label))
            ids.append(f"s{counter}")
            split_map[f"s{counter}"] = split
            counter += 1
    return corpus, ids, split_map


def test_split_stats_synthetic_hand_tally():
    corpus, ids, split_map = _synthetic_corpus()
    stats = split_stats(corpus, split_map, ids)
    assert stats["train"].instances == 4
    assert stats["train"].useful_pct == pytest.approx(50.0)
    assert stats["train"].events_per_pledge == pytest.approx(4.0)
    assert stats["dev"].useful_pct == pytest.approx(50.0)
    assert stats["test"].useful_pct == pytest.approx(100 / 3)
    assert stats["test"].events_per_pledge == pytest.approx(3.0)


def test_split_stats_single_pledge_example():
    pledge = validate_pledge("Labour", "2024-07-04", "UK", "We will ban trail hunting")
    corpus = [
        make_instance(pledge, "e1", "useful"),
        make_instance(pledge, "e2", "useful"),
        make_instance(pledge, "e3", "not_useful"),
        make_instance(pledge, "e4", "not_useful"),
    ]
    ids = ["a", "b", "c", "d"]
    stats = split_stats(corpus, {i: "train" for i in ids}, ids)
    assert stats["train"].useful_pct == pytest.approx(50.0)
    assert stats["train"].events_per_pledge == pytest.approx(4.0)


def test_split_stats_pledge_spanning_splits_rejected():
    corpus, ids, split_map = _synthetic_corpus()
    split_map[ids[0]] = "dev"  # pledge 0 now straddles train and dev
    with pytest.raises(SplitPartitionError):
        split_stats(corpus, split_map, ids)


def test_split_stats_missing_instance_rejected():
    corpus, ids, split_map = _synthetic_corpus()
    del split_map[ids[-1]]
    with pytest.raises(InputFileError):
        split_stats(corpus, split_map, ids)


def test_round_half_up():
    assert round_half_up(0.6325) == 0.633
    assert round_half_up(0.6324) == 0.632
    assert round_half_up(0.5125) == 0.513
    assert round_half_up(20.855, 2) == 20.86
