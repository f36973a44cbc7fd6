"""trec_eval-compatible evaluation of a Run against Qrels.

Semantics follow the reference evaluation tool: rankings are the canonical
(score desc, doc_id desc) order truncated at the evaluation depth, unjudged
documents count as nonrelevant, and aggregates are arithmetic means over
every qrels topic with at least one relevant document (complete-set
averaging: eligible topics missing from the run score zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import EmptyTopicSubset, NoRelevant, UnknownMetric, UnknownTopic
from .trec_io import Qrels, Run

DEFAULT_DEPTH = 1000
DEFAULT_PRECISION_CUTOFFS = (5, 10, 15, 20, 30, 100, 200, 500, 1000)
RECALL_LEVELS = tuple(i / 10 for i in range(11))


def _ranking(run: Run, topic_id: str, depth: int | None) -> list[str]:
    entries = run.topic_list(topic_id)
    if depth is not None:
        entries = entries[:depth]
    return [doc for doc, _ in entries]


def _require_relevant(qrels: Qrels, topic_id: str) -> int:
    if topic_id not in qrels.judgments:
        raise UnknownTopic(topic_id)
    r = qrels.relevant_count(topic_id)
    if r == 0:
        raise NoRelevant(topic_id)
    return r


def precision_at(run: Run, qrels: Qrels, topic_id: str, n: int, depth: int | None = DEFAULT_DEPTH) -> float:
    """Fraction of the top n that is judged relevant; short lists pad with nonrelevant."""
    if topic_id not in qrels.judgments:
        raise UnknownTopic(topic_id)
    if n < 1:
        raise ValueError("cutoff must be >= 1")
    rel = qrels.relevant_docs(topic_id)
    docs = _ranking(run, topic_id, depth)[:n]
    return sum(1 for d in docs if d in rel) / n


def recall_at(run: Run, qrels: Qrels, topic_id: str, n: int | None = None, depth: int | None = DEFAULT_DEPTH) -> float:
    """Fraction of the judged-relevant set retrieved in the top n (whole list if n is None)."""
    r = _require_relevant(qrels, topic_id)
    rel = qrels.relevant_docs(topic_id)
    docs = _ranking(run, topic_id, depth)
    if n is not None:
        docs = docs[:n]
    return sum(1 for d in docs if d in rel) / r


def average_precision(run: Run, qrels: Qrels, topic_id: str, depth: int | None = DEFAULT_DEPTH) -> float:
    r = _require_relevant(qrels, topic_id)
    rel = qrels.relevant_docs(topic_id)
    hits = 0
    total = 0.0
    for i, doc in enumerate(_ranking(run, topic_id, depth), start=1):
        if doc in rel:
            hits += 1
            total += hits / i
    return total / r


def r_precision(run: Run, qrels: Qrels, topic_id: str, depth: int | None = DEFAULT_DEPTH) -> float:
    r = _require_relevant(qrels, topic_id)
    rel = qrels.relevant_docs(topic_id)
    docs = _ranking(run, topic_id, depth)[:r]
    return sum(1 for d in docs if d in rel) / r


def bpref(run: Run, qrels: Qrels, topic_id: str, depth: int | None = DEFAULT_DEPTH) -> float:
    """Binary preference over judged documents only.

    Each retrieved relevant doc contributes 1 - min(nonrel above it, R)/min(R, N);
    with no judged nonrelevant docs every retrieved relevant contributes 1.
    """
    r = _require_relevant(qrels, topic_id)
    judged = qrels.judgments[topic_id]
    n = qrels.nonrelevant_count(topic_id)
    denom = min(r, n)
    nonrel_above = 0
    total = 0.0
    for doc in _ranking(run, topic_id, depth):
        g = judged.get(doc)
        if g is None:
            continue
        if g > 0:
            if denom == 0:
                total += 1.0
            else:
                total += 1.0 - min(nonrel_above, r) / denom
        else:
            nonrel_above += 1
    return total / r


def ndcg(run: Run, qrels: Qrels, topic_id: str, depth: int | None = DEFAULT_DEPTH) -> float:
    """Linear-gain NDCG with a log2(rank+1) discount; unjudged docs gain zero."""
    _require_relevant(qrels, topic_id)
    judged = qrels.judgments[topic_id]
    dcg = 0.0
    for i, doc in enumerate(_ranking(run, topic_id, depth), start=1):
        g = judged.get(doc, 0)
        if g > 0:
            dcg += g / math.log2(i + 1)
    ideal = sorted((g for g in judged.values() if g > 0), reverse=True)
    if depth is not None:
        ideal = ideal[:depth]
    idcg = sum(g / math.log2(i + 1) for i, g in enumerate(ideal, start=1))
    return dcg / idcg if idcg else 0.0


def pr_curve(run: Run, qrels: Qrels, topic_id: str, depth: int | None = DEFAULT_DEPTH) -> list[float]:
    """Interpolated precision at the 11 standard recall levels 0.0, 0.1, ..., 1.0."""
    r = _require_relevant(qrels, topic_id)
    rel = qrels.relevant_docs(topic_id)
    docs = _ranking(run, topic_id, depth)
    # precision/recall after each rank, then interpolate: iprec(level) is the
    # max precision at any rank whose recall reaches the level
    points = []
    hits = 0
    for i, doc in enumerate(docs, start=1):
        if doc in rel:
            hits += 1
            points.append((hits / r, hits / i))
    out = []
    for level in RECALL_LEVELS:
        best = 0.0
        for recall, precision in points:
            if recall >= level - 1e-12 and precision > best:
                best = precision
        out.append(best)
    return out


@dataclass
class TopicEval:
    topic_id: str
    values: dict[str, float]
    relevant: int
    nonrelevant: int


@dataclass
class EvalReport:
    run_tag: str
    topics: dict[str, TopicEval]
    aggregates: dict[str, float]
    eligible_topics: int
    metric_ids: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class MetricInfo:
    metric_id: str
    display_name: str
    needs_cutoff: bool = False
    extended: bool = False

    def as_dict(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "display_name": self.display_name,
            "needs_cutoff": self.needs_cutoff,
            "extended": self.extended,
        }


METRICS: dict[str, MetricInfo] = {
    m.metric_id: m
    for m in [
        MetricInfo("map", "Mean Average Precision"),
        MetricInfo("P", "Precision at n", needs_cutoff=True),
        MetricInfo("recall", "Recall", needs_cutoff=True),
        MetricInfo("Rprec", "R-Precision", extended=True),
        MetricInfo("bpref", "Binary Preference"),
        MetricInfo("ndcg", "Normalized Discounted Cumulative Gain"),
        MetricInfo("iprec_at_recall", "Interpolated Precision/Recall Curve", extended=True),
    ]
}


def expand_metric_ids(metric_ids: list[str]) -> list[str]:
    """Expand family names (P, recall, iprec_at_recall) into concrete column ids."""
    out: list[str] = []
    for mid in metric_ids:
        if mid == "P":
            out.extend(f"P_{n}" for n in DEFAULT_PRECISION_CUTOFFS)
        elif mid == "iprec_at_recall":
            out.extend(f"iprec_at_recall_{level:.2f}" for level in RECALL_LEVELS)
        elif mid == "recall":
            out.append("recall")
        else:
            _parse_metric_id(mid)  # validation
            out.append(mid)
    return out


def _parse_metric_id(mid: str):
    """Split a concrete metric id into (family, cutoff-or-level)."""
    if mid in ("map", "Rprec", "bpref", "ndcg", "recall"):
        return mid, None
    if mid.startswith("P_"):
        return "P", int(mid[2:])
    if mid.startswith("recall_"):
        return "recall", int(mid[7:])
    if mid.startswith("iprec_at_recall_"):
        return "iprec_at_recall", float(mid[len("iprec_at_recall_"):])
    raise UnknownMetric(mid, METRICS)


def _topic_values(run, qrels, topic_id, metric_ids, depth) -> dict[str, float]:
    values: dict[str, float] = {}
    curve: list[float] | None = None
    for mid in metric_ids:
        family, arg = _parse_metric_id(mid)
        if family == "map":
            values[mid] = average_precision(run, qrels, topic_id, depth)
        elif family == "Rprec":
            values[mid] = r_precision(run, qrels, topic_id, depth)
        elif family == "bpref":
            values[mid] = bpref(run, qrels, topic_id, depth)
        elif family == "ndcg":
            values[mid] = ndcg(run, qrels, topic_id, depth)
        elif family == "P":
            values[mid] = precision_at(run, qrels, topic_id, arg, depth)
        elif family == "recall":
            values[mid] = recall_at(run, qrels, topic_id, arg, depth)
        else:
            if curve is None:
                curve = pr_curve(run, qrels, topic_id, depth)
            values[mid] = curve[RECALL_LEVELS.index(round(arg, 2))]
    return values


def evaluate(
    run: Run,
    qrels: Qrels,
    metric_ids: list[str] | None = None,
    topic_subset: list[str] | None = None,
    depth: int | None = DEFAULT_DEPTH,
) -> EvalReport:
    """Per-topic and aggregate metric values over the given topic subset.

    The subset defaults to all qrels topics. Topics without relevant docs are
    excluded from aggregation; eligible topics missing from the run score
    zero on every metric.
    """
    if metric_ids is None:
        metric_ids = ["map", "P", "recall", "Rprec", "bpref", "ndcg", "iprec_at_recall"]
    concrete = expand_metric_ids(metric_ids)
    if topic_subset is None:
        topic_subset = qrels.topics()
    if not topic_subset:
        raise EmptyTopicSubset("evaluation needs at least one topic")
    unknown = [t for t in topic_subset if t not in qrels.judgments]
    if unknown:
        raise UnknownTopic(unknown[0])
    topics: dict[str, TopicEval] = {}
    sums = {mid: 0.0 for mid in concrete}
    eligible = 0
    for topic_id in sorted(topic_subset):
        r = qrels.relevant_count(topic_id)
        if r == 0:
            continue
        eligible += 1
        if run.topic_list(topic_id):
            values = _topic_values(run, qrels, topic_id, concrete, depth)
        else:
            values = {mid: 0.0 for mid in concrete}
        topics[topic_id] = TopicEval(
            topic_id=topic_id,
            values=values,
            relevant=r,
            nonrelevant=qrels.nonrelevant_count(topic_id),
        )
        for mid, v in values.items():
            sums[mid] += v
    aggregates = {mid: (sums[mid] / eligible if eligible else 0.0) for mid in concrete}
    return EvalReport(
        run_tag=run.run_tag,
        topics=topics,
        aggregates=aggregates,
        eligible_topics=eligible,
        metric_ids=concrete,
    )
