"""End-to-end experiment: ingest a dataset, cross-validate, compare systems.

An experiment fixes its dataset, run selection, topic split, fusion specs
and metrics up front; the split is materialized once and every row of the
results table is evaluated on the identical test-topic set. Under k-fold
cross-validation the trained algorithms learn on k-1 folds and fuse the
held-out fold, so each topic is fused exactly once.

Run with: python3 demos/04_experiment_workflow.py
"""

import random
import tempfile
from pathlib import Path

from fuseval import Store, create_experiment, run_experiment, add_fusion
from fuseval.trec_io import Run, canonical_sort, write_run

rng = random.Random(11)
TOPICS = [str(t) for t in range(1, 11)]
POOL = [f"d{i:02d}" for i in range(40)]


def synthetic_run_text(tag):
    lists = {}
    for topic in TOPICS:
        docs = rng.sample(POOL, 15)
        lists[topic] = canonical_sort([(d, round(rng.uniform(0, 10), 3)) for d in docs])
    return write_run(Run(run_tag=tag, lists=lists))


with tempfile.TemporaryDirectory() as tmp:
    store = Store(Path(tmp) / "store")

    qrels_text = "".join(
        f"{t} 0 {d} {rng.randint(0, 1)}\n" for t in TOPICS for d in rng.sample(POOL, 20)
    )
    dataset = store.ingest_dataset(
        "demo-collection",
        [synthetic_run_text(f"sys{i}") for i in range(3)],
        qrels_text,
    )
    print(f"ingested dataset {dataset.dataset_id} with runs {sorted(dataset.run_refs)}")

    record = create_experiment(store, {
        "dataset": dataset.dataset_id,
        "runs": sorted(dataset.run_refs),
        "split": {"kind": "kfold", "k": 5, "seed": 3},
        "fusions": [
            {"algorithm": "combmnz"},
            {"algorithm": "probfuse", "params": {"x": 5, "variant": "judged"}},
        ],
        "metrics": ["map", "P_5", "ndcg"],
    })
    print(f"created experiment {record['experiment_id']}, "
          f"folds: {record['split']['folds']}")

    record = run_experiment(store, record["experiment_id"])
    print("\nresults (significance vs the per-metric best component,")
    print("dag = t-test p < 0.05, ddag = p < 0.01):")
    for row in record["results"]["rows"]:
        if "aggregates" not in row:
            continue
        cells = []
        for metric_id in record["results"]["metric_ids"]:
            cell = f"{row['aggregates'][metric_id]:.4f}"
            sig = row.get("significance", {}).get(metric_id)
            if sig:
                p = sig["t_test"]["p_value"]
                cell += " ddag" if p < 0.01 else (" dag" if p < 0.05 else "")
            cells.append(cell)
        print(f"  {row['name']:<18} " + "  ".join(cells))

    # Adding an algorithm later reuses the frozen split and never recomputes
    # the existing cells; it only appends one row.
    record = add_fusion(store, record["experiment_id"], {"algorithm": "segfuse"})
    print("\nafter add_fusion('segfuse'):",
          [f["label"] + "=" + f["status"] for f in record["fusions"]])
