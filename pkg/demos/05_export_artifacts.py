"""Export a finished experiment as a LaTeX table, CSV series and a zip bundle.

Run with: python3 demos/05_export_artifacts.py
"""

import random
import tempfile
import zipfile
from io import BytesIO
from pathlib import Path

from fuseval import Store, create_experiment, run_experiment
from fuseval.export import export_bundle, export_latex, export_plot_data
from fuseval.trec_io import Run, canonical_sort, write_run

rng = random.Random(23)
TOPICS = [str(t) for t in range(1, 7)]
POOL = [f"d{i:02d}" for i in range(30)]


def synthetic_run_text(tag):
    lists = {}
    for topic in TOPICS:
        docs = rng.sample(POOL, 12)
        lists[topic] = canonical_sort([(d, round(rng.uniform(0, 10), 3)) for d in docs])
    return write_run(Run(run_tag=tag, lists=lists))


with tempfile.TemporaryDirectory() as tmp:
    store = Store(Path(tmp) / "store")
    dataset = store.ingest_dataset(
        "export-demo",
        [synthetic_run_text(f"sys{i}") for i in range(2)],
        "".join(f"{t} 0 {d} {rng.randint(0, 1)}\n"
                for t in TOPICS for d in rng.sample(POOL, 15)),
    )
    record = create_experiment(store, {
        "dataset": dataset.dataset_id,
        "fusions": [{"algorithm": "combsum"}, {"algorithm": "combmnz"}],
        "metrics": ["map", "P_5", "iprec_at_recall"],
    })
    record = run_experiment(store, record["experiment_id"])

    print("LaTeX table (best value per column in bold):\n")
    print(export_latex(record))

    series = export_plot_data(record)
    print("plot series files:", sorted(series))
    print("first pr_curve.csv lines:")
    print("\n".join(series["pr_curve.csv"].splitlines()[:4]))

    # The bundle is byte-deterministic: same experiment, same bytes.
    bundle = export_bundle(store, record)
    assert bundle == export_bundle(store, record)
    with zipfile.ZipFile(BytesIO(bundle)) as zf:
        print("\nbundle members:", zf.namelist())
