"""Experiment orchestration: select runs, split queries, train, fuse, evaluate, compare.

An experiment is defined once (dataset, ordered runs, split plan, fusion
specs, metrics, baseline), its split is materialized immediately and never
changes, and every fusion and component row is evaluated on the identical
test-topic set. Trained algorithms only ever see training topics; under
k-fold cross-validation each topic is tested exactly once, with per-topic
scores pooled across folds before aggregation and significance testing.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from . import fusion as fusion_mod
from . import metrics as metrics_mod
from . import significance as sig_mod
from .errors import (
    DuplicateSpec,
    FusevalError,
    KTooLarge,
    NotFound,
    OverlappingSplit,
    TrainingRequired,
    UnknownTopicInSplit,
)
from .store import Store
from .trec_io import Qrels, Run, write_run

SYNTHETIC_ROWS = ("best_component", "mean_component", "median_component")


# --- deterministic shuffling ---

_MASK = (1 << 64) - 1


def splitmix64(seed: int):
    """Stateful splitmix64 generator yielding 64-bit values."""
    state = seed & _MASK

    def next_value() -> int:
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    return next_value

def seeded_shuffle(items: list, seed: int) -> list:
    """Fisher-Yates shuffle driven by splitmix64; deterministic for a given seed."""
    out = list(items)
    rng = splitmix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


# --- split plans ---

@dataclass(frozen=True)
class SplitPlan:
    kind: str  # all_test | holdout | kfold
    train: tuple[str, ...] = ()
    test: tuple[str, ...] = ()
    k: int = 0
    seed: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "SplitPlan":
        kind = d.get("kind", "all_test")
        if kind not in ("all_test", "holdout", "kfold"):
            raise FusevalError(f"unknown split kind {kind!r}")
        return cls(
            kind=kind,
            train=tuple(str(t) for t in d.get("train", [])),
            test=tuple(str(t) for t in d.get("test", [])),
            k=int(d.get("k", 0)),
            seed=d.get("seed"),
        )


@dataclass(frozen=True)
class MaterializedSplit:
    """Fully explicit topic assignment; immutable once the experiment is created."""

    kind: str
    train: tuple[str, ...]
    test: tuple[str, ...]
    folds: tuple[tuple[str, ...], ...] = ()

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "train": list(self.train),
            "test": list(self.test),
            "folds": [list(f) for f in self.folds],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MaterializedSplit":
        return cls(
            kind=d["kind"],
            train=tuple(d["train"]),
            test=tuple(d["test"]),
            folds=tuple(tuple(f) for f in d.get("folds", [])),
        )


def materialize_split(plan: SplitPlan, topic_ids: list[str]) -> MaterializedSplit:
    """Resolve a split plan against a concrete topic set.

    holdout: explicit lists must be disjoint; a missing test list defaults to
    the complement of train. kfold: topics sorted (optionally shuffled by the
    seed) and dealt round-robin, fold(i) = position mod k.
    """
    topics = sorted(set(topic_ids))
    if not topics:
        raise FusevalError("cannot split an empty topic set")
    if plan.kind == "all_test":
        return MaterializedSplit(kind="all_test", train=(), test=tuple(topics))
    if plan.kind == "holdout":
        train = list(dict.fromkeys(plan.train))
        test = list(dict.fromkeys(plan.test))
        unknown = (set(train) | set(test)) - set(topics)
        if unknown:
            raise UnknownTopicInSplit(unknown)
        if set(train) & set(test):
            raise OverlappingSplit("train and test topics overlap")
        if not test:
            test = [t for t in topics if t not in set(train)]
        return MaterializedSplit(kind="holdout", train=tuple(sorted(train)), test=tuple(sorted(test)))
    # kfold
    if plan.k < 2:
        raise FusevalError("kfold needs k >= 2")
    if plan.k > len(topics):
        raise KTooLarge(f"k={plan.k} exceeds the {len(topics)} available topics")
    ordered = seeded_shuffle(topics, plan.seed) if plan.seed is not None else topics
    folds: list[list[str]] = [[] for _ in range(plan.k)]
    for i, topic in enumerate(ordered):
        folds[i % plan.k].append(topic)
    return MaterializedSplit(
        kind="kfold",
        train=(),
        test=tuple(topics),
        folds=tuple(tuple(sorted(f)) for f in folds),
    )


# --- experiment definition ---

def _spec_from_dict(d: dict) -> fusion_mod.FusionSpec:
    return fusion_mod.FusionSpec(algorithm_id=d["algorithm"], params=d.get("params", {}))


def create_experiment(store: Store, definition: dict) -> dict:
    """Validate a definition document and persist a new pending experiment record.

    Definition fields: dataset, runs, split{kind,k,seed,train,test},
    fusions[{algorithm,params}], metrics, baseline, include_components.
    """
    dataset = store.get_dataset(str(definition["dataset"]))
    run_tags = [str(t) for t in definition.get("runs", [])] or sorted(dataset.run_refs)
    unknown = [t for t in run_tags if t not in dataset.run_refs]
    if unknown:
        raise NotFound(f"runs {unknown} in dataset {dataset.dataset_id}")
    plan = SplitPlan.from_dict(definition.get("split", {"kind": "all_test"}))
    split = materialize_split(plan, dataset.topic_ids)
    specs = [_spec_from_dict(f) for f in definition.get("fusions", [])]
    keys = [s.canonical_key() for s in specs]
    if len(set(keys)) != len(keys):
        raise DuplicateSpec("definition repeats a fusion spec")
    metric_ids = definition.get("metrics") or ["map", "P", "recall", "Rprec", "bpref", "ndcg", "iprec_at_recall"]
    metrics_mod.expand_metric_ids(metric_ids)  # validation
    record = {
        "experiment_id": store.fresh_experiment_id(definition),
        "dataset_id": dataset.dataset_id,
        "run_tags": run_tags,
        "split": split.as_dict(),
        "fusions": [
            {
                "algorithm": s.algorithm_id,
                "params": s.params,
                "label": s.label(),
                "status": "pending",
                "fused_ref": None,
                "eval_ref": None,
                "error": None,
                "train_sets": [],
            }
            for s in specs
        ],
        "metrics": metric_ids,
        "baseline": definition.get("baseline", "best_component"),
        "include_components": bool(definition.get("include_components", True)),
        "created": time.time(),
        "status": "pending",
        "results": None,
    }
    store.put_experiment(record)
    return record


# --- execution ---

def _train_sets_for(split: MaterializedSplit) -> list[tuple[list[str], list[str]]]:
    """(train_topics, fuse_topics) pairs covering the test set exactly once."""
    if split.kind == "kfold":
        all_topics = set(split.test)
        return [
            (sorted(all_topics - set(fold)), list(fold))
            for fold in split.folds
        ]
    return [(list(split.train), list(split.test))]


def _run_spec(
    spec: fusion_mod.FusionSpec,
    runs: list[Run],
    qrels: Qrels,
    split: MaterializedSplit,
) -> tuple[Run, list[list[str]]]:
    """Train (per fold where needed) and fuse every test topic exactly once."""
    lists: dict[str, list[tuple[str, float]]] = {}
    train_sets: list[list[str]] = []
    for train_topics, fuse_topics in _train_sets_for(split):
        model = None
        if spec.requires_training:
            if not train_topics:
                raise TrainingRequired(
                    f"{spec.algorithm_id} needs training topics but the plan provides none"
                )
            model = fusion_mod.train(spec, runs, qrels, train_topics)
            train_sets.append(list(model.train_topics))
        fused = fusion_mod.fuse_run(spec, runs, fuse_topics, model=model, run_tag=spec.label())
        lists.update(fused.lists)
    return Run(run_tag=spec.label(), lists=lists), train_sets


def _eval_payload(report: metrics_mod.EvalReport) -> dict:
    return {
        "run_tag": report.run_tag,
        "metric_ids": report.metric_ids,
        "aggregates": report.aggregates,
        "eligible_topics": report.eligible_topics,
        "per_topic": {t: te.values for t, te in sorted(report.topics.items())},
    }


def run_experiment(store: Store, experiment_id: str, depth: int | None = metrics_mod.DEFAULT_DEPTH) -> dict:
    """Execute all pending fusion specs and (re)build the evaluation table.

    Completed specs are never recomputed, so re-execution of a finished
    experiment is a no-op and newly added specs leave existing cells
    untouched. Per-spec failures are recorded without aborting the rest.
    """
    record = store.get_experiment(experiment_id)
    dataset = store.get_dataset(record["dataset_id"])
    qrels = store.load_dataset_qrels(dataset)
    by_tag = {tag: store.load_run(ref) for tag, ref in dataset.run_refs.items()}
    runs = [by_tag[tag] for tag in record["run_tags"]]
    split = MaterializedSplit.from_dict(record["split"])
    test_topics = list(split.test)
    metric_ids = record["metrics"]

    changed = False
    if record.get("include_components", True) and not record.get("component_evals"):
        changed = True
        component_evals = {}
        for tag in record["run_tags"]:
            report = metrics_mod.evaluate(by_tag[tag], qrels, metric_ids, test_topics, depth)
            component_evals[tag] = store.put_blob(
                json.dumps(_eval_payload(report), sort_keys=True)
            )
        record["component_evals"] = component_evals

    for entry in record["fusions"]:
        if entry["status"] != "pending":
            continue
        changed = True
        try:
            spec = fusion_mod.FusionSpec(entry["algorithm"], entry["params"])
            fused, train_sets = _run_spec(spec, runs, qrels, split)
            report = metrics_mod.evaluate(fused, qrels, metric_ids, test_topics, depth)
            entry["fused_ref"] = store.put_blob(write_run(fused))
            entry["eval_ref"] = store.put_blob(
                json.dumps(_eval_payload(report), sort_keys=True)
            )
            entry["train_sets"] = train_sets
            entry["status"] = "done"
            entry["error"] = None
        except FusevalError as exc:
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
        # persist after every spec so concurrent readers see finished rows
        record["results"] = build_results(store, record)
        record["status"] = "done" if all(
            f["status"] != "pending" for f in record["fusions"]
        ) else "partial"
        store.put_experiment(record)

    if changed and record["status"] == "done" and record["results"] is not None:
        return record
    record["results"] = build_results(store, record)
    record["status"] = "done" if all(
        f["status"] != "pending" for f in record["fusions"]
    ) else "partial"
    if changed or record["status"] != "done":
        store.put_experiment(record)
    return record


def _load_eval(store: Store, ref: str) -> dict:
    return json.loads(store.get_text(ref))


def build_results(store: Store, record: dict) -> dict:
    """Assemble the evaluation table: components, fusions, synthetic rows, significance."""
    concrete = metrics_mod.expand_metric_ids(record["metrics"])
    rows = []
    component_rows = []
    for tag in record["run_tags"]:
        ref = record.get("component_evals", {}).get(tag)
        if ref is None:
            continue
        payload = _load_eval(store, ref)
        row = {
            "name": tag,
            "kind": "component",
            "aggregates": payload["aggregates"],
            "per_topic": payload["per_topic"],
            "eval_ref": ref,
        }
        component_rows.append(row)
        rows.append(row)
    for entry in record["fusions"]:
        if entry["status"] != "done":
            rows.append({
                "name": entry["label"],
                "kind": "fusion",
                "status": entry["status"],
                "error": entry.get("error"),
            })
            continue
        payload = _load_eval(store, entry["eval_ref"])
        rows.append({
            "name": entry["label"],
            "kind": "fusion",
            "status": "done",
            "aggregates": payload["aggregates"],
            "per_topic": payload["per_topic"],
            "eval_ref": entry["eval_ref"],
            "fused_ref": entry["fused_ref"],
        })

    if component_rows:
        best, mean, median = {}, {}, {}
        for mid in concrete:
            vals = [r["aggregates"][mid] for r in component_rows]
            best[mid] = max(vals)
            mean[mid] = sum(vals) / len(vals)
            ordered = sorted(vals)
            # even count: lower of the two middle values, so the cell always
            # corresponds to an actual component score
            median[mid] = ordered[(len(ordered) - 1) // 2]
        rows.append({"name": "best_component", "kind": "synthetic", "aggregates": best})
        rows.append({"name": "mean_component", "kind": "synthetic", "aggregates": mean})
        rows.append({"name": "median_component", "kind": "synthetic", "aggregates": median})

    _attach_significance(record, rows, component_rows, concrete)
    test_topic_sets = [
        sorted(r["per_topic"]) for r in rows if r.get("per_topic") is not None
    ]
    return {
        "metric_ids": concrete,
        "test_topics": list(record["split"]["test"]),
        "rows": rows,
        "baseline": record.get("baseline", "best_component"),
        "consistent": all(s == test_topic_sets[0] for s in test_topic_sets) if test_topic_sets else True,
    }


def _baseline_row(record, rows, component_rows, metric_id):
    """Resolve the designated baseline's per-topic values for one metric."""
    designation = record.get("baseline", "best_component")
    candidates = [r for r in rows if r.get("per_topic") is not None]
    if designation == "best_component":
        pool = component_rows or candidates
        return max(pool, key=lambda r: (r["aggregates"][metric_id], r["name"])) if pool else None
    for r in candidates:
        if r["name"] == designation:
            return r
    return None


def _attach_significance(record, rows, component_rows, concrete):
    for metric_id in concrete:
        base = _baseline_row(record, rows, component_rows, metric_id)
        if base is None:
            continue
        for row in rows:
            if row.get("per_topic") is None or row is base:
                continue
            try:
                sample = sig_mod.PairedSample.from_reports(
                    metric_id,
                    {t: v[metric_id] for t, v in base["per_topic"].items()},
                    {t: v[metric_id] for t, v in row["per_topic"].items()},
                )
            except FusevalError:
                continue
            sig = row.setdefault("significance", {})
            sig[metric_id] = {
                "baseline": base["name"],
                "t_test": sig_mod.paired_t_test(sample).as_dict(),
                "wilcoxon": sig_mod.wilcoxon_signed_rank(sample).as_dict(),
            }


def add_fusion(store: Store, experiment_id: str, spec_dict: dict, execute: bool = True) -> dict:
    """Append a new fusion spec to a stored experiment and (optionally) run it.

    The new spec runs against the byte-identical materialized split and
    dataset references; existing rows are reused, never recomputed.
    """
    record = store.get_experiment(experiment_id)
    spec = _spec_from_dict(spec_dict)
    existing = {
        fusion_mod.FusionSpec(f["algorithm"], f["params"]).canonical_key()
        for f in record["fusions"]
    }
    if spec.canonical_key() in existing:
        raise DuplicateSpec(f"experiment already contains {spec.label()}")
    record["fusions"].append({
        "algorithm": spec.algorithm_id,
        "params": spec.params,
        "label": spec.label(),
        "status": "pending",
        "fused_ref": None,
        "eval_ref": None,
        "error": None,
        "train_sets": [],
    })
    # downgrade the status so pollers see the new spec as outstanding work
    record["status"] = "partial" if record.get("results") is not None else "pending"
    store.put_experiment(record)
    if execute:
        return run_experiment(store, experiment_id)
    return record
