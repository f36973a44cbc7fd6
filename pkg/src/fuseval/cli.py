"""Batch command-line interface mirroring the HTTP API.

Exit codes: 0 success, 1 validation error, 2 I/O error. All computation is
delegated to the core modules; the CLI only parses flags and moves bytes.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import engine, export, fusion, metrics
from .errors import FusevalError
from .store import Store, default_store_root
from .trec_io import parse_qrels, parse_run, write_run


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FusevalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _parse_params(param, weight):
    params = {}
    for item in param:
        key, _, raw = item.partition("=")
        if not _:
            raise click.UsageError(f"--param expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        params[key] = value
    if weight:
        weights = {}
        for item in weight:
            tag, _, raw = item.partition("=")
            if not _:
                raise click.UsageError(f"--weight expects tag=value, got {item!r}")
            weights[tag] = float(raw)
        params["weights"] = weights
    return params


@click.group()
def main():
    """Data fusion evaluation platform."""


@main.command()
@click.option("--algorithm", "-a", required=True, help="one of: " + ", ".join(fusion.ALGORITHMS))
@click.option("--run", "-r", "run_paths", multiple=True, required=True, type=click.Path(exists=True),
              help="component run file; repeat in fusion order")
@click.option("--qrels", "-q", "qrels_path", type=click.Path(exists=True),
              help="qrels file (needed by trained algorithms)")
@click.option("--train-topic", "train_topics", multiple=True,
              help="training topic id; repeat (needed by trained algorithms)")
@click.option("--param", "-p", multiple=True, help="algorithm parameter, key=value")
@click.option("--weight", "-w", multiple=True, help="linear weight, run_tag=value")
@click.option("--output", "-o", type=click.Path(), help="output run file (default stdout)")
@click.option("--tag", default=None, help="run tag for the fused output")
@_exit_codes
def fuse(algorithm, run_paths, qrels_path, train_topics, param, weight, output, tag):
    """Fuse component runs into a single TREC run."""
    spec = fusion.FusionSpec(algorithm, _parse_params(param, weight))
    runs = [parse_run(Path(p).read_text()) for p in run_paths]
    model = None
    if spec.requires_training:
        if not qrels_path:
            raise click.UsageError(f"{algorithm} requires --qrels and --train-topic")
        qrels = parse_qrels(Path(qrels_path).read_text())
        model = fusion.train(spec, runs, qrels, list(train_topics))
    topics = sorted({t for r in runs for t in r.lists})
    if spec.requires_training:
        topics = [t for t in topics if t not in set(train_topics)]
    fused = fusion.fuse_run(spec, runs, topics, model=model, run_tag=tag or spec.label())
    text = write_run(fused)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("eval")
@click.option("--run", "-r", "run_path", required=True, type=click.Path(exists=True))
@click.option("--qrels", "-q", "qrels_path", required=True, type=click.Path(exists=True))
@click.option("--metric", "-m", "metric_ids", multiple=True,
              help="metric id (map, P, P_10, recall, Rprec, bpref, ndcg, iprec_at_recall); "
                   "default: all")
@click.option("--depth", default=metrics.DEFAULT_DEPTH, show_default=True)
@click.option("--per-topic/--aggregates-only", default=True, show_default=True)
@_exit_codes
def eval_cmd(run_path, qrels_path, metric_ids, depth, per_topic):
    """Evaluate a run against qrels; prints 'metric topic value' lines."""
    run = parse_run(Path(run_path).read_text(), max_per_topic=None)
    qrels = parse_qrels(Path(qrels_path).read_text())
    report = metrics.evaluate(run, qrels, list(metric_ids) or None, depth=depth)
    for topic_id, te in sorted(report.topics.items()):
        if not per_topic:
            break
        for mid in report.metric_ids:
            click.echo(f"{mid}\t{topic_id}\t{te.values[mid]:.4f}")
    for mid in report.metric_ids:
        click.echo(f"{mid}\tall\t{report.aggregates[mid]:.4f}")


@main.group()
def dataset():
    """Manage stored datasets."""


@dataset.command("ingest")
@click.option("--store", "store_root", type=click.Path(), default=None,
              help="store root (default $FUSEVAL_STORE or ./fuseval-store)")
@click.option("--name", required=True)
@click.option("--run", "-r", "run_paths", multiple=True, required=True, type=click.Path(exists=True))
@click.option("--qrels", "-q", "qrels_path", required=True, type=click.Path(exists=True))
@click.option("--provenance", default="")
@_exit_codes
def dataset_ingest(store_root, name, run_paths, qrels_path, provenance):
    """Parse and store a dataset of runs plus a qrels file."""
    store = Store(store_root or default_store_root())
    record = store.ingest_dataset(
        name=name,
        run_texts=[Path(p).read_text() for p in run_paths],
        qrels_text=Path(qrels_path).read_text(),
        provenance=provenance,
    )
    for warning in record.coverage_warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(record.dataset_id)


@dataset.command("list")
@click.option("--store", "store_root", type=click.Path(), default=None)
@_exit_codes
def dataset_list(store_root):
    store = Store(store_root or default_store_root())
    for rec in store.list_datasets():
        click.echo(f"{rec.dataset_id}\t{rec.name}\t{len(rec.run_refs)} runs\t{len(rec.topic_ids)} topics")


@main.group()
def exp():
    """Create, run, extend and inspect experiments."""


@exp.command("create")
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.option("--file", "-f", "definition_path", required=True, type=click.Path(exists=True),
              help="experiment definition JSON (same schema as the API body)")
@_exit_codes
def exp_create(store_root, definition_path):
    store = Store(store_root or default_store_root())
    definition = json.loads(Path(definition_path).read_text())
    record = engine.create_experiment(store, definition)
    click.echo(record["experiment_id"])


@exp.command("run")
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.argument("experiment_id")
@_exit_codes
def exp_run(store_root, experiment_id):
    store = Store(store_root or default_store_root())
    before = store.get_experiment(experiment_id)
    if before.get("status") == "done":
        click.echo(f"{experiment_id}: already complete, no-op")
        return
    record = engine.run_experiment(store, experiment_id)
    for entry in record["fusions"]:
        line = f"{entry['label']}: {entry['status']}"
        if entry.get("error"):
            line += f" ({entry['error']})"
        click.echo(line)


@exp.command("add")
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.argument("experiment_id")
@click.option("--algorithm", "-a", required=True)
@click.option("--param", "-p", multiple=True)
@click.option("--weight", "-w", multiple=True)
@_exit_codes
def exp_add(store_root, experiment_id, algorithm, param, weight):
    """Add a fusion algorithm to a stored experiment and run it."""
    store = Store(store_root or default_store_root())
    record = engine.add_fusion(
        store, experiment_id,
        {"algorithm": algorithm, "params": _parse_params(param, weight)},
    )
    for entry in record["fusions"]:
        click.echo(f"{entry['label']}: {entry['status']}")


@exp.command("list")
@click.option("--store", "store_root", type=click.Path(), default=None)
@_exit_codes
def exp_list(store_root):
    store = Store(store_root or default_store_root())
    for rec in store.list_experiments():
        statuses = ",".join(f"{f['label']}={f['status']}" for f in rec["fusions"])
        click.echo(f"{rec['experiment_id']}\t{rec.get('status', 'pending')}\t{statuses}")


@exp.command("show")
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.argument("experiment_id")
@_exit_codes
def exp_show(store_root, experiment_id):
    store = Store(store_root or default_store_root())
    click.echo(json.dumps(store.get_experiment(experiment_id), indent=2, sort_keys=True))


@main.command("export")
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.argument("experiment_id")
@click.option("--format", "-f", "fmt", default="latex",
              type=click.Choice(["latex", "trec", "csv", "bundle", "plotdata"]))
@click.option("--spec", default=None, help="fusion spec label (for --format trec)")
@click.option("--output", "-o", type=click.Path(), help="output file (default stdout; required for bundle)")
@_exit_codes
def export_cmd(store_root, experiment_id, fmt, spec, output):
    """Export publication artifacts for a completed experiment."""
    store = Store(store_root or default_store_root())
    record = store.get_experiment(experiment_id)
    if fmt == "bundle":
        if not output:
            raise click.UsageError("--format bundle requires --output")
        Path(output).write_bytes(export.export_bundle(store, record))
        return
    if fmt == "plotdata":
        if not output:
            raise click.UsageError("--format plotdata requires --output DIRECTORY")
        outdir = Path(output)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in export.export_plot_data(record).items():
            (outdir / name).write_text(text)
        return
    if fmt == "latex":
        text = export.export_latex(record)
    elif fmt == "csv":
        text = export.export_csv_table(record)
    else:
        if spec is None:
            done = [f["label"] for f in record["fusions"] if f["status"] == "done"]
            if not done:
                raise FusevalError("no completed fusion specs to export")
            spec = done[0]
        text = export.export_trec_run(store, record, spec)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_root", type=click.Path(), default=None)
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="directory with the built web console, served at /")
@_exit_codes
def serve(port, host, store_root, static_dir):
    """Start the HTTP API (and optionally the web console)."""
    import uvicorn

    from .api import create_app

    app = create_app(store_root or default_store_root(), static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
