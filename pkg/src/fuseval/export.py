"""Publication and interchange outputs for completed experiments.

Everything exported here renders stored values; nothing is recomputed at
export time. Bundles are byte-deterministic: fixed member order and fixed
zip timestamps, so the same experiment always produces identical archives.
"""

from __future__ import annotations

import io
import zipfile

from .errors import IncompleteTable, NotFound
from .metrics import RECALL_LEVELS
from .significance import significance_marker
from .store import Store

LATEX_SIG_NOTE = "% markers: \\dag\\ p<0.05, \\ddag\\ p<0.01 (paired t-test vs baseline)"
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def _completed_rows(results: dict) -> list[dict]:
    pending = [r["name"] for r in results["rows"] if r.get("status") == "pending"]
    if pending:
        raise IncompleteTable(f"pending fusion specs: {pending}")
    return [r for r in results["rows"] if "aggregates" in r]


def _latex_escape(text: str) -> str:
    for ch in "&%$#_{}":
        text = text.replace(ch, "\\" + ch)
    return text


def export_latex(record: dict, metric_ids: list[str] | None = None) -> str:
    """Render the evaluation table as a standalone LaTeX tabular.

    One row per system, one column per metric, 4 decimal places, per-column
    best in bold, significance markers against the designated baseline.
    """
    results = record.get("results")
    if not results:
        raise IncompleteTable("experiment has no results yet")
    rows = _completed_rows(results)
    metric_ids = metric_ids or [
        m for m in results["metric_ids"] if not m.startswith("iprec_at_recall_")
    ]
    best = {
        mid: max(r["aggregates"][mid] for r in rows)
        for mid in metric_ids
    }
    header = " & ".join(["System"] + [_latex_escape(m) for m in metric_ids])
    lines = [
        f"% experiment {record['experiment_id']}, dataset {record['dataset_id']}, "
        f"split {record['split']['kind']}",
        LATEX_SIG_NOTE,
        "\\begin{tabular}{l" + "r" * len(metric_ids) + "}",
        "\\hline",
        header + " \\\\",
        "\\hline",
    ]
    for row in rows:
        cells = []
        for mid in metric_ids:
            value = row["aggregates"][mid]
            cell = f"{value:.4f}"
            if value == best[mid]:
                cell = f"\\textbf{{{cell}}}"
            sig = row.get("significance", {}).get(mid)
            if sig:
                marker = significance_marker(sig["t_test"]["p_value"])
                if marker == "†":
                    cell += "$^{\\dag}$"
                elif marker == "‡":
                    cell += "$^{\\ddag}$"
            cells.append(cell)
        lines.append(" & ".join([_latex_escape(row["name"])] + cells) + " \\\\")
    lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def export_trec_run(store: Store, record: dict, spec_label: str) -> str:
    """The stored fused run for one completed spec, verbatim."""
    for entry in record["fusions"]:
        if entry["label"] == spec_label:
            if entry["status"] != "done" or not entry.get("fused_ref"):
                raise NotFound(f"completed fused run for {spec_label!r}")
            return store.get_text(entry["fused_ref"])
    raise NotFound(f"fusion spec {spec_label!r} in experiment {record['experiment_id']}")


def export_plot_data(record: dict) -> dict[str, str]:
    """CSV series for charts: per-metric bars and 11-point PR curves per system."""
    results = record.get("results")
    if not results:
        raise IncompleteTable("experiment has no results yet")
    rows = _completed_rows(results)
    files: dict[str, str] = {}
    bar_metrics = [
        m for m in results["metric_ids"] if not m.startswith("iprec_at_recall_")
    ]
    if bar_metrics:
        lines = ["system,metric,value"]
        for row in rows:
            for mid in bar_metrics:
                lines.append(f"{row['name']},{mid},{row['aggregates'][mid]:.6f}")
        files["metrics_bar.csv"] = "\n".join(lines) + "\n"
    curve_metrics = [
        m for m in results["metric_ids"] if m.startswith("iprec_at_recall_")
    ]
    if curve_metrics:
        lines = ["system,recall,iprec"]
        for row in rows:
            for level in RECALL_LEVELS:
                mid = f"iprec_at_recall_{level:.2f}"
                if mid in row["aggregates"]:
                    lines.append(f"{row['name']},{level:.2f},{row['aggregates'][mid]:.6f}")
        files["pr_curve.csv"] = "\n".join(lines) + "\n"
    return files


def export_csv_table(record: dict) -> str:
    """Flat CSV of the evaluation table (system, metric, value)."""
    results = record.get("results")
    if not results:
        raise IncompleteTable("experiment has no results yet")
    rows = _completed_rows(results)
    lines = ["system," + ",".join(results["metric_ids"])]
    for row in rows:
        cells = [f"{row['aggregates'][m]:.6f}" for m in results["metric_ids"]]
        lines.append(",".join([row["name"]] + cells))
    return "\n".join(lines) + "\n"


def export_bundle(store: Store, record: dict) -> bytes:
    """Deterministic zip of plot series, the LaTeX table, the CSV table and fused runs."""
    members: list[tuple[str, bytes]] = []
    for name, text in sorted(export_plot_data(record).items()):
        members.append((f"series/{name}", text.encode()))
    members.append(("table.tex", export_latex(record).encode()))
    members.append(("table.csv", export_csv_table(record).encode()))
    for entry in record["fusions"]:
        if entry["status"] == "done" and entry.get("fused_ref"):
            safe = entry["label"].replace("/", "_")
            members.append((f"runs/{safe}.run", store.get_blob(entry["fused_ref"])))
    members.sort(key=lambda m: m[0])
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, data in members:
            info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            zf.writestr(info, data)
    return buf.getvalue()
