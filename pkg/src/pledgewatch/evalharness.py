"""Metric computation for filtering quality, retrieval quality, and corpus stats.

Filtering uses standard P/R/F1 with "useful" as the positive class.
Retrieval quality is judged over pooled URLs: pledge-level metrics are
macro-averaged per monitoring request, URL-level metrics are micro
metrics pooled over all requests, and novelty counts useful retrievals
no other system found.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .domain import DECISION_USEFUL, AnnotatedInstance
from .errors import InputFileError, SplitPartitionError
from .retrieval import normalize_url

SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")


@dataclass(frozen=True)
class RetrievalJudgment:
    request_id: str
    system_name: str
    url: str
    judged_useful: bool


@dataclass
class RetrievalReport:
    system_name: str
    pledge_level: tuple[float, float, float]
    url_level: tuple[float, float, float]
    novelty: int
    requests_scored: int
    warning: str | None = None


@dataclass
class SplitStats:
    instances: int
    pledges: int
    useful_pct: float
    events_per_pledge: float


def round_half_up(value: float, places: int = 3) -> float:
    quantum = Decimal(10) ** -places
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def prf(counts: ConfusionCounts) -> tuple[float, float, float]:
    """Precision, recall, F1; a zero denominator yields 0 for that metric."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def filtering_metrics(
    predictions: list[tuple[str, str]],
    gold: list[AnnotatedInstance],
    gold_ids: list[str] | None = None,
) -> tuple[float, float, float]:
    """Score predicted labels against gold instances.

    Instances with no prediction count as not_useful. Duplicate
    prediction ids are an input error; so are ids outside the gold set.
    """
    ids = gold_ids if gold_ids is not None else [f"i{n:06d}" for n in range(len(gold))]
    if len(ids) != len(gold):
        raise ValueError("gold_ids must align with gold instances")
    gold_by_id = dict(zip(ids, (inst.label for inst in gold)))
    predicted: dict[str, str] = {}
    for instance_id, label in predictions:
        if instance_id in predicted:
            raise InputFileError(f"duplicate prediction id {instance_id!r}")
        if instance_id not in gold_by_id:
            raise InputFileError(f"prediction id {instance_id!r} not in gold set")
        predicted[instance_id] = label

    tp = fp = fn = tn = 0
    for instance_id, gold_label in gold_by_id.items():
        pred_label = predicted.get(instance_id, "not_useful")
        gold_pos = gold_label == DECISION_USEFUL
        pred_pos = pred_label == DECISION_USEFUL
        if pred_pos and gold_pos:
            tp += 1
        elif pred_pos and not gold_pos:
            fp += 1
        elif not pred_pos and gold_pos:
            fn += 1
        else:
            tn += 1
    return prf(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn))


def _pooled(judgments: list[RetrievalJudgment]):
    """Deduplicate rows on the normalized (request, system, url) key."""
    useful: dict[str, set[str]] = {}
    returned: dict[tuple[str, str], set[str]] = {}
    systems: set[str] = set()
    seen: set[tuple[str, str, str]] = set()
    for row in judgments:
        url = normalize_url(row.url)
        key = (row.request_id, row.system_name, url)
        if key in seen:
            continue
        seen.add(key)
        systems.add(row.system_name)
        returned.setdefault((row.request_id, row.system_name), set()).add(url)
        if row.judged_useful:
            useful.setdefault(row.request_id, set()).add(url)
    requests = sorted({req for req, _ in returned})
    return requests, returned, useful, systems


def retrieval_metrics(
    judgments: list[RetrievalJudgment],
    system: str,
    skip_unreturned_requests: bool = False,
) -> RetrievalReport:
    """Pledge-level (macro), URL-level (micro), and novelty for one system.

    Ground truth per request is every URL judged useful for any system.
    Requests where this system returned nothing score 0 unless
    ``skip_unreturned_requests`` drops them from the macro average.
    """
    requests, returned, useful, systems = _pooled(judgments)
    if system not in systems:
        return RetrievalReport(
            system_name=system,
            pledge_level=(0.0, 0.0, 0.0),
            url_level=(0.0, 0.0, 0.0),
            novelty=0,
            requests_scored=0,
            warning=f"system {system!r} absent from judgments",
        )

    per_request: list[tuple[float, float, float]] = []
    total_tp = total_fp = total_fn = 0
    novelty = 0
    for request_id in requests:
        gold = useful.get(request_id, set())
        mine = returned.get((request_id, system), set())
        if not mine and skip_unreturned_requests:
            continue
        tp = len(mine & gold)
        fp = len(mine - gold)
        fn = len(gold - mine)
        per_request.append(prf(ConfusionCounts(tp=tp, fp=fp, fn=fn)))
        total_tp += tp
        total_fp += fp
        total_fn += fn
        others = set()
        for other_system in systems - {system}:
            others |= returned.get((request_id, other_system), set())
        novelty += len((mine & gold) - others)

    if per_request:
        count = len(per_request)
        pledge_level = (
            sum(p for p, _, _ in per_request) / count,
            sum(r for _, r, _ in per_request) / count,
            sum(f for _, _, f in per_request) / count,
        )
    else:
        pledge_level = (0.0, 0.0, 0.0)
    url_level = prf(ConfusionCounts(tp=total_tp, fp=total_fp, fn=total_fn))
    return RetrievalReport(
        system_name=system,
        pledge_level=pledge_level,
        url_level=url_level,
        novelty=novelty,
        requests_scored=len(per_request),
    )


def split_stats(
    corpus: list[AnnotatedInstance],
    split_map: dict[str, str],
    ids: list[str] | None = None,
) -> dict[str, SplitStats]:
    """Per-split useful percentage and mean events per pledge.

    ``split_map`` assigns each instance id to train/dev/test; splits must
    partition the corpus by pledge, or :class:`SplitPartitionError` is
    raised.
    """
    instance_ids = ids if ids is not None else [f"i{n:06d}" for n in range(len(corpus))]
    if len(instance_ids) != len(corpus):
        raise ValueError("ids must align with corpus instances")

    pledge_split: dict[str, str] = {}
    grouped: dict[str, list[AnnotatedInstance]] = {s: [] for s in SPLITS}
    for instance_id, instance in zip(instance_ids, corpus):
        split = split_map.get(instance_id)
        if split is None:
            raise InputFileError(f"instance {instance_id!r} missing from split map")
        if split not in SPLITS:
            raise InputFileError(f"unknown split {split!r} for instance {instance_id!r}")
        pledge_id = instance.pledge.id
        previous = pledge_split.get(pledge_id)
        if previous is not None and previous != split:
            raise SplitPartitionError(
                f"pledge {pledge_id} appears in both {previous!r} and {split!r}"
            )
        pledge_split[pledge_id] = split
        grouped[split].append(instance)

    stats = {}
    for split in SPLITS:
        instances = grouped[split]
        if not instances:
            stats[split] = SplitStats(instances=0, pledges=0, useful_pct=0.0, events_per_pledge=0.0)
            continue
        pledges = {i.pledge.id for i in instances}
        useful = sum(1 for i in instances if i.label == DECISION_USEFUL)
        stats[split] = SplitStats(
            instances=len(instances),
            pledges=len(pledges),
            useful_pct=100.0 * useful / len(instances),
            events_per_pledge=len(instances) / len(pledges),
        )
    return stats
