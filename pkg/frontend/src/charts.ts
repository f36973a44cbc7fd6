/**
 * SVG charts for the dashboard. Geometry is computed locally (bar heights,
 * line coordinates) but every text label is a name, a metric id fragment, or
 * a value string taken verbatim from the API payload.
 */

import type { Results, ResultRow } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

const SERIES_COLORS = [
  "#31708f", "#8a6d3b", "#3c763d", "#a94442", "#6f42c1", "#e36209",
  "#005cc5", "#22863a",
];

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

function scoredRows(results: Results): ResultRow[] {
  return results.rows.filter((r) => r.aggregates !== undefined);
}

/** Horizontal bar chart of one metric across all scored rows. */
export function renderBarChart(results: Results, metricId: string): SVGSVGElement {
  const rows = scoredRows(results).filter(
    (r) => r.aggregates![metricId] !== undefined,
  );
  const barHeight = 22;
  const labelWidth = 170;
  const plotWidth = 360;
  const height = rows.length * barHeight + 30;
  const svg = svgElement("svg", {
    width: labelWidth + plotWidth + 90,
    height,
    class: "chart bar-chart",
    "data-metric": metricId,
  });
  const maxValue = Math.max(...rows.map((r) => r.aggregates![metricId]), 1e-9);

  const title = svgElement("text", { x: labelWidth, y: 16, class: "chart-title" });
  title.textContent = metricId;
  svg.append(title);

  rows.forEach((row, i) => {
    const y = 24 + i * barHeight;
    const width = (row.aggregates![metricId] / maxValue) * plotWidth;
    const label = svgElement("text", {
      x: labelWidth - 6, y: y + 14, "text-anchor": "end", class: `bar-label row-${row.kind}`,
    });
    label.textContent = row.name;
    const bar = svgElement("rect", {
      x: labelWidth, y: y + 2, width: Math.max(width, 1), height: barHeight - 6,
      class: `bar bar-${row.kind}`,
    });
    const value = svgElement("text", {
      x: labelWidth + width + 6, y: y + 14, class: "bar-value",
    });
    value.textContent = String(row.aggregates![metricId]);
    svg.append(label, bar, value);
  });
  return svg;
}

/**
 * Precision-recall overlay built from the interpolated-precision series.
 * One polyline per row that carries the full recall-level aggregates.
 */
export function renderPrCurve(results: Results): SVGSVGElement | null {
  const levels = results.metric_ids
    .filter((m) => m.startsWith("iprec_at_recall_"))
    .sort();
  if (levels.length === 0) return null;
  const rows = scoredRows(results).filter((r) =>
    levels.every((m) => r.aggregates![m] !== undefined),
  );
  const width = 440;
  const height = 300;
  const margin = 40;
  const svg = svgElement("svg", {
    width: width + 200, height, class: "chart pr-chart",
  });
  svg.append(
    svgElement("rect", {
      x: margin, y: 10, width: width - margin, height: height - margin - 10,
      class: "plot-frame",
    }),
  );

  const x = (i: number) => margin + (i / (levels.length - 1)) * (width - margin);
  const y = (v: number) => height - margin - v * (height - margin - 10);

  levels.forEach((metricId, i) => {
    // tick label is the recall level spelled inside the metric id itself
    const tick = svgElement("text", {
      x: x(i), y: height - margin + 16, "text-anchor": "middle", class: "tick",
    });
    tick.textContent = metricId.slice("iprec_at_recall_".length);
    svg.append(tick);
  });

  rows.forEach((row, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const points = levels
      .map((m, i) => `${x(i)},${y(row.aggregates![m])}`)
      .join(" ");
    svg.append(
      svgElement("polyline", {
        points, fill: "none", stroke: color, "stroke-width": 1.5,
        class: `pr-line row-${row.kind}`, "data-system": row.name,
      }),
    );
    const legend = svgElement("text", {
      x: width + 10, y: 24 + idx * 16, fill: color, class: `legend row-${row.kind}`,
    });
    legend.textContent = row.name;
    svg.append(legend);
  });
  return svg;
}

/** Serialize a chart and hand it to the browser as an .svg download. */
export function downloadChart(svg: SVGSVGElement, filename: string): void {
  const markup = new XMLSerializer().serializeToString(svg);
  const blob = new Blob([markup], { type: "image/svg+xml" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}
