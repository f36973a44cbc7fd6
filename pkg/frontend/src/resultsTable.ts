/**
 * Results dashboard table. Cell text comes straight from the API payload via
 * String(value); the table never rounds, rescales, or recomputes a metric.
 */

import type { Results, ResultRow, SignificanceCell } from "./types";

/** Interpolated-precision series feed the PR chart, not the table. */
export function tableMetricIds(results: Results): string[] {
  return results.metric_ids.filter((m) => !m.startsWith("iprec_at_recall_"));
}

export function significanceMarker(cell: SignificanceCell | undefined): string {
  if (!cell) return "";
  if (cell.t_test.p_value < 0.01) return "‡";
  if (cell.t_test.p_value < 0.05) return "†";
  return "";
}

function cellText(row: ResultRow, metricId: string): string {
  if (row.status === "pending") return "…";
  if (row.status === "failed") return row.error ?? "failed";
  const value = row.aggregates?.[metricId];
  if (value === undefined) return "";
  return String(value) + significanceMarker(row.significance?.[metricId]);
}

export function renderResultsTable(results: Results): HTMLTableElement {
  const metricIds = tableMetricIds(results);
  const table = document.createElement("table");
  table.className = "results-table";

  const cell = (tr: HTMLTableRowElement, text: string) => {
    const td = document.createElement("td");
    td.textContent = text;
    tr.append(td);
    return td;
  };

  const thead = document.createElement("thead");
  const head = document.createElement("tr");
  cell(head, "system");
  for (const metricId of metricIds) {
    cell(head, metricId);
  }
  thead.append(head);

  const body = document.createElement("tbody");
  for (const row of results.rows) {
    const tr = document.createElement("tr");
    tr.className = `row-${row.kind}`;
    if (row.name === results.baseline) tr.classList.add("row-baseline");
    cell(tr, row.name);
    if (row.status === "failed") {
      const td = cell(tr, cellText(row, ""));
      td.colSpan = metricIds.length;
      td.className = "cell-error";
    } else {
      for (const metricId of metricIds) {
        cell(tr, cellText(row, metricId));
      }
    }
    body.append(tr);
  }
  table.append(thead, body);
  return table;
}

/** Caption line for the dashboard: baseline name and consistency flag. */
export function renderTableCaption(results: Results): HTMLElement {
  const caption = document.createElement("p");
  caption.className = "table-caption";
  const consistency = results.consistent
    ? "consistent test set"
    : "WARNING: inconsistent test sets";
  caption.textContent =
    `baseline: ${results.baseline} · ${consistency} · † and ‡ mark paired-t significance`;
  return caption;
}
