"""Score normalization and the seven fusion algorithms.

Trained methods (probfuse, segfuse, slidefuse) split into a training phase
producing an immutable FusionModel and a merging phase applying it per
topic. Untrained methods (interleave, combsum, combmnz, linear) merge
directly. All merges rank by fused score descending with ties broken by
doc_id descending, matching the canonical run ordering so fusion output is
stable under re-parse.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from operator import itemgetter

from .errors import (
    AllWeightsZero,
    InvalidFusionParams,
    InvalidSegmentCount,
    MissingWeight,
    ModelRunMismatch,
    NegativeWindow,
    NoRuns,
    NoTrainingTopics,
    UnknownAlgorithm,
)
from .trec_io import Qrels, Run

DEFAULT_PROBFUSE_SEGMENTS = 25
DEFAULT_SLIDEFUSE_WINDOW = 5


_RANK_KEY = itemgetter(1, 0)


def _ranked(scored: dict[str, float]) -> list[tuple[str, float]]:
    return sorted(scored.items(), key=_RANK_KEY, reverse=True)


def _normalize_map(entries: list[tuple[str, float]]) -> dict[str, float]:
    if not entries:
        return {}
    scores = [s for _, s in entries]
    lo, hi = min(scores), max(scores)
    if hi == lo:
        n = len(entries)
        return {d: 1.0 - i / n for i, (d, _) in enumerate(entries)}
    span = hi - lo
    return {d: (s - lo) / span for d, s in entries}


def normalize_minmax(entries: list[tuple[str, float]]) -> list[tuple[str, float]]:
    """Min-max normalize one topic's scored list into [0, 1].

    When all scores are equal (including single-item lists) falls back to the
    rank-based value 1 - (r-1)/L so the list still carries ordering signal.
    """
    return list(_normalize_map(entries).items())


@dataclass(frozen=True)
class FusionModel:
    """Trained per-run parameters for a probabilistic fusion algorithm.

    probabilities[run_tag] is indexed by segment (probfuse/segfuse) or by
    position (slidefuse, windowed values). slidefuse additionally keeps the
    raw positional vector. train_topics records the exact training set for
    the consistency rule.
    """

    algorithm_id: str
    probabilities: dict[str, tuple[float, ...]]
    train_topics: tuple[str, ...]
    params: dict = field(default_factory=dict)
    raw_probabilities: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def check_tags(self, runs: list[Run]) -> None:
        missing = {r.run_tag for r in runs} - set(self.probabilities)
        if missing:
            raise ModelRunMismatch(missing)


def _require_runs(runs: list[Run]) -> None:
    if not runs:
        raise NoRuns("at least one run is required")


def fuse_interleave(runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """Round-robin over runs in the given order, skipping already-emitted docs.

    Scores are synthetic positional values (T-i+1)/T so the output is a valid
    TREC run that reparses to the same ordering.
    """
    _require_runs(runs)
    cursors = [run.topic_list(topic_id) for run in runs]
    positions = [0] * len(runs)
    emitted: set[str] = set()
    order: list[str] = []
    remaining = sum(len(c) for c in cursors)
    while remaining:
        progressed = False
        for m, entries in enumerate(cursors):
            p = positions[m]
            while p < len(entries) and entries[p][0] in emitted:
                p += 1
            if p < len(entries):
                doc = entries[p][0]
                emitted.add(doc)
                order.append(doc)
                p += 1
                progressed = True
            positions[m] = p
        remaining = sum(len(c) - p for c, p in zip(cursors, positions))
        if not progressed:
            break
    if not order:
        return []
    total = len(order)
    return [(d, (total - i) / total) for i, d in enumerate(order)]


def _normalized_scores(runs: list[Run], topic_id: str) -> list[dict[str, float]]:
    return [_normalize_map(run.topic_list(topic_id)) for run in runs]


def fuse_combsum(runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """CombSum: fused score is the sum of normalized scores over runs retrieving the doc."""
    _require_runs(runs)
    fused: Counter[str] = Counter()
    for norm in _normalized_scores(runs, topic_id):
        fused.update(norm)  # Counter sums values per key at C speed
    return _ranked(fused)


def fuse_combmnz(runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """CombMNZ: CombSum multiplied by the number of runs retrieving the doc."""
    _require_runs(runs)
    sums: Counter[str] = Counter()
    counts: Counter[str] = Counter()
    for norm in _normalized_scores(runs, topic_id):
        sums.update(norm)
        counts.update(norm.keys())
    return _ranked({d: counts[d] * s for d, s in sums.items()})


def fuse_linear(runs: list[Run], weights: dict[str, float], topic_id: str) -> list[tuple[str, float]]:
    """Manually weighted linear combination of normalized scores."""
    _require_runs(runs)
    for run in runs:
        if run.run_tag not in weights:
            raise MissingWeight(run.run_tag)
        if weights[run.run_tag] < 0:
            raise InvalidFusionParams(f"negative weight for {run.run_tag!r}")
    if all(weights[r.run_tag] == 0 for r in runs):
        raise AllWeightsZero("all linear weights are zero")
    fused: dict[str, float] = {}
    for run, norm in zip(runs, _normalized_scores(runs, topic_id)):
        w = weights[run.run_tag]
        for doc, n in norm.items():
            fused[doc] = fused.get(doc, 0.0) + w * n
    return _ranked(fused)


# --- ProbFuse ---

def probfuse_segment(rank: int, length: int, x: int) -> int:
    """Segment index for a 1-based rank in a list of the given length: min(x, ceil(r*x/L))."""
    return min(x, -(-rank * x // length))


def train_probfuse(
    runs: list[Run],
    qrels: Qrels,
    train_topics: list[str],
    x: int = DEFAULT_PROBFUSE_SEGMENTS,
    variant: str = "all",
) -> FusionModel:
    """Estimate per-segment relevance probabilities for each run.

    variant "all": a topic contributes (judged-relevant in segment)/|segment|.
    variant "judged": it contributes rel/(rel+nonrel) over judged docs only,
    zero when the segment holds no judged docs. Missing topics contribute
    zero to every segment. Probabilities average over all training topics.
    """
    _require_runs(runs)
    if x < 1:
        raise InvalidSegmentCount(f"segment count must be >= 1, got {x}")
    if not train_topics:
        raise NoTrainingTopics("probfuse training needs at least one topic")
    if variant not in ("all", "judged"):
        raise InvalidFusionParams(f"unknown probfuse variant {variant!r}")
    n_topics = len(train_topics)
    probs: dict[str, tuple[float, ...]] = {}
    for run in runs:
        totals = [0.0] * x
        for topic_id in train_topics:
            entries = run.topic_list(topic_id)
            if not entries:
                continue
            length = len(entries)
            judged = qrels.judgments.get(topic_id, {})
            rel = [0] * x
            nonrel = [0] * x
            size = [0] * x
            for r, (doc, _) in enumerate(entries, start=1):
                k = probfuse_segment(r, length, x) - 1
                size[k] += 1
                g = judged.get(doc)
                if g is None:
                    continue
                if g > 0:
                    rel[k] += 1
                else:
                    nonrel[k] += 1
            for k in range(x):
                if variant == "all":
                    if size[k]:
                        totals[k] += rel[k] / size[k]
                else:
                    judged_k = rel[k] + nonrel[k]
                    if judged_k:
                        totals[k] += rel[k] / judged_k
        probs[run.run_tag] = tuple(t / n_topics for t in totals)
    return FusionModel(
        algorithm_id="probfuse",
        probabilities=probs,
        train_topics=tuple(train_topics),
        params={"x": x, "variant": variant},
    )


def fuse_probfuse(model: FusionModel, runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """Merge with F(d) = sum over runs of P_m(k)/k, k the doc's segment index."""
    _require_runs(runs)
    model.check_tags(runs)
    x = model.params["x"]
    fused: dict[str, float] = {}
    for run in runs:
        entries = run.topic_list(topic_id)
        if not entries:
            continue
        p = model.probabilities[run.run_tag]
        length = len(entries)
        for r, (doc, _) in enumerate(entries, start=1):
            k = probfuse_segment(r, length, x)
            fused[doc] = fused.get(doc, 0.0) + p[k - 1] / k
    return _ranked(fused)


# --- SegFuse ---

def segfuse_sizes(length: int) -> list[int]:
    """Segment sizes 10*2^(k-1) - 5 tiled over a list of the given length, last truncated."""
    sizes = []
    covered = 0
    k = 1
    while covered < length:
        size = 10 * (1 << (k - 1)) - 5
        sizes.append(min(size, length - covered))
        covered += size
        k += 1
    return sizes


def segfuse_segment(rank: int) -> int:
    """1-based segment index of a 1-based rank under the geometric tiling."""
    covered = 0
    k = 1
    while True:
        covered += 10 * (1 << (k - 1)) - 5
        if rank <= covered:
            return k
        k += 1


def train_segfuse(runs: list[Run], qrels: Qrels, train_topics: list[str]) -> FusionModel:
    """Estimate per-segment probabilities under geometrically growing segments."""
    _require_runs(runs)
    if not train_topics:
        raise NoTrainingTopics("segfuse training needs at least one topic")
    n_topics = len(train_topics)
    probs: dict[str, tuple[float, ...]] = {}
    for run in runs:
        longest = max((len(run.topic_list(t)) for t in train_topics), default=0)
        n_segments = len(segfuse_sizes(longest)) if longest else 1
        totals = [0.0] * n_segments
        for topic_id in train_topics:
            entries = run.topic_list(topic_id)
            if not entries:
                continue
            judged = qrels.judgments.get(topic_id, {})
            sizes = segfuse_sizes(len(entries))
            rel = [0] * len(sizes)
            pos = 0
            for k, size in enumerate(sizes):
                for doc, _ in entries[pos : pos + size]:
                    g = judged.get(doc)
                    if g is not None and g > 0:
                        rel[k] += 1
                pos += size
            for k, size in enumerate(sizes):
                totals[k] += rel[k] / size
        probs[run.run_tag] = tuple(t / n_topics for t in totals)
    return FusionModel(
        algorithm_id="segfuse",
        probabilities=probs,
        train_topics=tuple(train_topics),
    )


def fuse_segfuse(model: FusionModel, runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """Merge with F(d) = sum over runs of P_m(k) * (1 + normalized score)."""
    _require_runs(runs)
    model.check_tags(runs)
    fused: dict[str, float] = {}
    for run in runs:
        entries = run.topic_list(topic_id)
        if not entries:
            continue
        p = model.probabilities[run.run_tag]
        norm = normalize_minmax(entries)
        for r, (doc, n) in enumerate(norm, start=1):
            # ranks past the trained segment range clamp to the last segment
            k = min(segfuse_segment(r), len(p))
            fused[doc] = fused.get(doc, 0.0) + p[k - 1] * (1.0 + n)
    return _ranked(fused)


# --- SlideFuse ---

def slide_window(raw: list[float], a: int) -> list[float]:
    """Average each position over the window [p-a, p+a] truncated at the boundaries."""
    p_max = len(raw)
    out = []
    for p in range(1, p_max + 1):
        lo = max(1, p - a)
        hi = min(p_max, p + a)
        out.append(sum(raw[lo - 1 : hi]) / (hi - lo + 1))
    return out


def train_slidefuse(
    runs: list[Run],
    qrels: Qrels,
    train_topics: list[str],
    a: int = DEFAULT_SLIDEFUSE_WINDOW,
) -> FusionModel:
    """Estimate per-position relevance probabilities and their windowed averages.

    P_m(p) is the fraction of training topics whose rank-p document is judged
    relevant; shorter lists and missing topics count as nonrelevant with the
    full denominator.
    """
    _require_runs(runs)
    if not train_topics:
        raise NoTrainingTopics("slidefuse training needs at least one topic")
    if a < 0:
        raise NegativeWindow(f"window half-width must be >= 0, got {a}")
    n_topics = len(train_topics)
    windowed: dict[str, tuple[float, ...]] = {}
    raw_all: dict[str, tuple[float, ...]] = {}
    for run in runs:
        p_max = max((len(run.topic_list(t)) for t in train_topics), default=0)
        raw = [0.0] * p_max
        for topic_id in train_topics:
            judged = qrels.judgments.get(topic_id, {})
            for p, (doc, _) in enumerate(run.topic_list(topic_id)):
                g = judged.get(doc)
                if g is not None and g > 0:
                    raw[p] += 1.0
        raw = [v / n_topics for v in raw]
        raw_all[run.run_tag] = tuple(raw)
        windowed[run.run_tag] = tuple(slide_window(raw, a))
    return FusionModel(
        algorithm_id="slidefuse",
        probabilities=windowed,
        train_topics=tuple(train_topics),
        params={"a": a},
        raw_probabilities=raw_all,
    )


def fuse_slidefuse(model: FusionModel, runs: list[Run], topic_id: str) -> list[tuple[str, float]]:
    """Merge with F(d) = sum over runs of the windowed probability at the doc's rank."""
    _require_runs(runs)
    model.check_tags(runs)
    fused: dict[str, float] = {}
    for run in runs:
        p_w = model.probabilities[run.run_tag]
        if not p_w:
            for doc, _ in run.topic_list(topic_id):
                fused.setdefault(doc, 0.0)
            continue
        p_max = len(p_w)
        for r, (doc, _) in enumerate(run.topic_list(topic_id), start=1):
            v = p_w[min(r, p_max) - 1]
            fused[doc] = fused.get(doc, 0.0) + v
    return _ranked(fused)


# --- algorithm registry ---

@dataclass(frozen=True)
class ParamSchema:
    name: str
    type: str
    default: object = None
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple[str, ...] | None = None
    description: str = ""

    def as_dict(self) -> dict:
        d = {"name": self.name, "type": self.type, "default": self.default}
        if self.minimum is not None:
            d["minimum"] = self.minimum
        if self.maximum is not None:
            d["maximum"] = self.maximum
        if self.choices is not None:
            d["choices"] = list(self.choices)
        if self.description:
            d["description"] = self.description
        return d


@dataclass(frozen=True)
class AlgorithmInfo:
    algorithm_id: str
    display_name: str
    requires_training: bool
    params: tuple[ParamSchema, ...] = ()

    def as_dict(self) -> dict:
        return {
            "algorithm_id": self.algorithm_id,
            "display_name": self.display_name,
            "requires_training": self.requires_training,
            "params": [p.as_dict() for p in self.params],
        }


ALGORITHMS: dict[str, AlgorithmInfo] = {
    a.algorithm_id: a
    for a in [
        AlgorithmInfo("interleave", "Interleave", False),
        AlgorithmInfo("combsum", "CombSum", False),
        AlgorithmInfo("combmnz", "CombMNZ", False),
        AlgorithmInfo(
            "linear",
            "Linear Combination",
            False,
            (
                ParamSchema(
                    "weights", "map", default=None,
                    description="non-negative weight per run tag; at least one positive",
                ),
            ),
        ),
        AlgorithmInfo(
            "probfuse",
            "ProbFuse",
            True,
            (
                ParamSchema("x", "int", default=DEFAULT_PROBFUSE_SEGMENTS, minimum=1,
                            description="number of segments"),
                ParamSchema("variant", "enum", default="all", choices=("all", "judged")),
            ),
        ),
        AlgorithmInfo("segfuse", "SegFuse", True),
        AlgorithmInfo(
            "slidefuse",
            "SlideFuse",
            True,
            (
                ParamSchema("a", "int", default=DEFAULT_SLIDEFUSE_WINDOW, minimum=0,
                            description="window half-width"),
            ),
        ),
    ]
}


@dataclass(frozen=True)
class FusionSpec:
    """An algorithm choice plus validated parameters."""

    algorithm_id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm_id not in ALGORITHMS:
            raise UnknownAlgorithm(self.algorithm_id, ALGORITHMS)
        validate_params(self.algorithm_id, self.params)

    @property
    def requires_training(self) -> bool:
        return ALGORITHMS[self.algorithm_id].requires_training

    def canonical_key(self) -> str:
        """Stable identity for duplicate detection: algorithm + sorted-key params."""
        import json

        return self.algorithm_id + ":" + json.dumps(self.params, sort_keys=True)

    def label(self) -> str:
        """Short human-readable tag, e.g. 'probfuse(x=2,variant=all)'."""
        if not self.params:
            return self.algorithm_id
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.algorithm_id}({inner})"


def validate_params(algorithm_id: str, params: dict) -> None:
    info = ALGORITHMS[algorithm_id]
    known = {p.name for p in info.params}
    extra = set(params) - known
    if extra:
        raise InvalidFusionParams(f"{algorithm_id} does not accept params {sorted(extra)}")
    for schema in info.params:
        if schema.name not in params:
            if schema.name == "weights" and algorithm_id == "linear":
                raise InvalidFusionParams("linear fusion requires explicit weights")
            continue
        value = params[schema.name]
        if schema.type == "int":
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidFusionParams(f"{schema.name} must be an integer")
            if schema.minimum is not None and value < schema.minimum:
                raise InvalidFusionParams(f"{schema.name} must be >= {schema.minimum}")
        elif schema.type == "enum":
            if value not in schema.choices:
                raise InvalidFusionParams(f"{schema.name} must be one of {list(schema.choices)}")
        elif schema.type == "map":
            if not isinstance(value, dict):
                raise InvalidFusionParams(f"{schema.name} must be a mapping")
            if any((not isinstance(w, (int, float))) or w < 0 for w in value.values()):
                raise InvalidFusionParams("weights must be non-negative numbers")
            if value and all(w == 0 for w in value.values()):
                raise AllWeightsZero("all linear weights are zero")


def train(spec: FusionSpec, runs: list[Run], qrels: Qrels, train_topics: list[str]) -> FusionModel | None:
    """Train a model for the spec, or None for training-free algorithms."""
    if not spec.requires_training:
        return None
    if spec.algorithm_id == "probfuse":
        return train_probfuse(
            runs, qrels, train_topics,
            x=spec.params.get("x", DEFAULT_PROBFUSE_SEGMENTS),
            variant=spec.params.get("variant", "all"),
        )
    if spec.algorithm_id == "segfuse":
        return train_segfuse(runs, qrels, train_topics)
    if spec.algorithm_id == "slidefuse":
        return train_slidefuse(
            runs, qrels, train_topics, a=spec.params.get("a", DEFAULT_SLIDEFUSE_WINDOW)
        )
    raise UnknownAlgorithm(spec.algorithm_id, ALGORITHMS)


def fuse_topic(
    spec: FusionSpec,
    runs: list[Run],
    topic_id: str,
    model: FusionModel | None = None,
) -> list[tuple[str, float]]:
    """Apply the spec's merge phase to one topic."""
    aid = spec.algorithm_id
    if aid == "interleave":
        return fuse_interleave(runs, topic_id)
    if aid == "combsum":
        return fuse_combsum(runs, topic_id)
    if aid == "combmnz":
        return fuse_combmnz(runs, topic_id)
    if aid == "linear":
        return fuse_linear(runs, spec.params["weights"], topic_id)
    if model is None:
        raise InvalidFusionParams(f"{aid} requires a trained model")
    if aid == "probfuse":
        return fuse_probfuse(model, runs, topic_id)
    if aid == "segfuse":
        return fuse_segfuse(model, runs, topic_id)
    if aid == "slidefuse":
        return fuse_slidefuse(model, runs, topic_id)
    raise UnknownAlgorithm(aid, ALGORITHMS)


def fuse_run(
    spec: FusionSpec,
    runs: list[Run],
    topics: list[str],
    model: FusionModel | None = None,
    run_tag: str = "fused",
) -> Run:
    """Fuse the given topics into a single Run with canonical ordering."""
    lists = {}
    for topic_id in topics:
        merged = fuse_topic(spec, runs, topic_id, model=model)
        if merged:
            # fused scores already decrease down the list; re-sorting only
            # settles ties the same way the parser would
            lists[topic_id] = sorted(merged, key=_RANK_KEY, reverse=True)
    return Run(run_tag=run_tag, lists=lists)
