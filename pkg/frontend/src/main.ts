/**
 * Single-page console: dataset browser, experiment builder, run monitor with
 * results dashboard. Navigation is hash-based; all data flows through api.ts.
 */

import { api, ApiError } from "./api";
import { ExperimentBuilder, renderSplitPreview } from "./builder";
import { downloadChart, renderBarChart, renderPrCurve } from "./charts";
import { pollExperiment } from "./poll";
import { renderResultsTable, renderTableCaption, tableMetricIds } from "./resultsTable";
import { renderFields, schemaToFields } from "./schemaToForm";
import type { AlgorithmInfo, MetricInfo, ResultsPayload } from "./types";

const root = document.getElementById("app")!;

let algorithms: AlgorithmInfo[] = [];
let metrics: MetricInfo[] = [];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function showError(err: unknown): void {
  const banner = el("div", "error-banner");
  banner.textContent =
    err instanceof ApiError
      ? `error: ${err.message}${err.field ? ` (field: ${err.field})` : ""}`
      : `error: ${String(err)}`;
  root.prepend(banner);
  setTimeout(() => banner.remove(), 8000);
}

// --- dataset browser ---

async function datasetView(): Promise<void> {
  root.replaceChildren(el("h2", "", "Datasets"));
  const datasets = await api.listDatasets();

  const list = el("div", "dataset-list");
  for (const ds of datasets) {
    const card = el("div", "dataset-card");
    card.append(
      el("h3", "", `${ds.name} (${ds.dataset_id})`),
      el("p", "", `runs: ${Object.keys(ds.run_refs).sort().join(", ")}`),
      el("p", "", `topics: ${ds.topic_ids.join(" ")}`),
    );
    for (const warning of ds.coverage_warnings) {
      card.append(el("p", "coverage-warning", warning));
    }
    const use = el("button", "", "build experiment");
    use.addEventListener("click", () => {
      location.hash = `#/build/${ds.dataset_id}`;
    });
    card.append(use);
    list.append(card);
  }
  root.append(list);

  const form = el("div", "upload-form");
  form.append(el("h3", "", "Upload dataset"));
  const name = el("input");
  name.placeholder = "dataset name";
  const runsInput = el("input");
  runsInput.type = "file";
  runsInput.multiple = true;
  const qrelsInput = el("input");
  qrelsInput.type = "file";
  const submit = el("button", "", "upload");
  submit.addEventListener("click", async () => {
    try {
      const runTexts = await Promise.all(
        Array.from(runsInput.files ?? []).map((f) => f.text()),
      );
      const qrelsFile = qrelsInput.files?.[0];
      if (!qrelsFile || runTexts.length === 0) {
        throw new Error("select at least one run file and a qrels file");
      }
      await api.uploadDataset(name.value, runTexts, await qrelsFile.text());
      await datasetView();
    } catch (err) {
      showError(err);
    }
  });
  form.append(
    name,
    el("span", "", " run files: "), runsInput,
    el("span", "", " qrels: "), qrelsInput,
    submit,
  );
  root.append(form);
}

// --- experiment builder ---

async function builderView(datasetId: string): Promise<void> {
  const datasets = await api.listDatasets();
  const dataset = datasets.find((d) => d.dataset_id === datasetId);
  if (!dataset) {
    showError(new Error(`unknown dataset ${datasetId}`));
    return;
  }
  const builder = new ExperimentBuilder();
  builder.datasetId = datasetId;

  root.replaceChildren(el("h2", "", `New experiment on ${dataset.name}`));

  const runsPanel = el("div", "runs-panel");
  runsPanel.append(el("h3", "", "Runs (selection order is fusion order)"));
  const order = el("p", "run-order");
  const refresh = () => {
    order.textContent = builder.runTags.join(" → ") || "none selected";
  };
  for (const tag of Object.keys(dataset.run_refs).sort()) {
    const label = el("label", "run-toggle");
    const box = el("input");
    box.type = "checkbox";
    box.addEventListener("change", () => {
      box.checked ? builder.selectRun(tag) : builder.deselectRun(tag);
      refresh();
    });
    label.append(box, ` ${tag}`);
    runsPanel.append(label);
  }
  refresh();
  runsPanel.append(order);
  root.append(runsPanel);

  const specsPanel = el("div", "specs-panel");
  specsPanel.append(el("h3", "", "Fusion algorithms"));
  const specList = el("div", "spec-list");
  for (const algorithm of algorithms) {
    const button = el("button", "algo-button", algorithm.display_name);
    button.addEventListener("click", () => {
      const spec = builder.addAlgorithm(algorithm);
      const entry = el("div", "spec-entry");
      entry.append(el("strong", "", algorithm.algorithm_id));
      entry.append(renderFields(spec.fields));
      const remove = el("button", "", "remove");
      remove.addEventListener("click", () => {
        builder.removeSpec(spec);
        entry.remove();
      });
      entry.append(remove);
      specList.append(entry);
    });
    specsPanel.append(button);
  }
  specsPanel.append(specList);
  root.append(specsPanel);

  const splitPanel = el("div", "split-panel");
  splitPanel.append(el("h3", "", "Split"));
  const kindSelect = el("select");
  for (const kind of ["all_test", "holdout", "kfold"]) {
    const opt = el("option", "", kind);
    opt.value = kind;
    kindSelect.append(opt);
  }
  const kInput = el("input");
  kInput.type = "number";
  kInput.min = "2";
  kInput.value = "5";
  const seedInput = el("input");
  seedInput.type = "number";
  seedInput.value = "0";
  const trainInput = el("input");
  trainInput.placeholder = "train topics (space separated, holdout only)";
  const applySplit = () => {
    const kind = kindSelect.value as "all_test" | "holdout" | "kfold";
    builder.split = { kind };
    if (kind === "kfold") {
      builder.split.k = Number(kInput.value);
      builder.split.seed = Number(seedInput.value);
    }
    if (kind === "holdout" && trainInput.value.trim()) {
      builder.split.train = trainInput.value.trim().split(/\s+/);
    }
  };
  for (const input of [kindSelect, kInput, seedInput, trainInput]) {
    input.addEventListener("change", applySplit);
  }
  splitPanel.append(
    kindSelect,
    el("span", "", " k: "), kInput,
    el("span", "", " seed: "), seedInput,
    trainInput,
  );
  root.append(splitPanel);

  const metricsPanel = el("div", "metrics-panel");
  metricsPanel.append(el("h3", "", "Metrics"));
  for (const metric of metrics) {
    const label = el("label", "metric-toggle");
    const box = el("input");
    box.type = "checkbox";
    box.addEventListener("change", () => {
      builder.metricIds = box.checked
        ? [...builder.metricIds, metric.metric_id]
        : builder.metricIds.filter((m) => m !== metric.metric_id);
    });
    label.append(box, ` ${metric.metric_id}`);
    metricsPanel.append(label);
  }
  root.append(metricsPanel);

  const baselinePanel = el("div", "baseline-panel");
  baselinePanel.append(el("h3", "", "Baseline"));
  const baselineInput = el("input");
  baselineInput.value = builder.baseline;
  baselineInput.addEventListener("change", () => {
    builder.baseline = baselineInput.value;
  });
  baselinePanel.append(baselineInput);
  root.append(baselinePanel);

  const preview = el("div", "preview-panel");
  const create = el("button", "primary", "create experiment");
  create.addEventListener("click", async () => {
    try {
      applySplit();
      const record = await builder.submit();
      preview.replaceChildren(
        el("h3", "", `Created ${record.experiment_id}`),
        renderSplitPreview(record.split),
      );
      const run = el("button", "primary", "run");
      run.addEventListener("click", () => {
        location.hash = `#/experiment/${record.experiment_id}`;
      });
      preview.append(run);
    } catch (err) {
      showError(err);
    }
  });
  root.append(create, preview);
}

// --- run & monitor / dashboard ---

function renderDashboard(container: HTMLElement, payload: ResultsPayload): void {
  container.replaceChildren();
  const statuses = payload.fusions
    .map((f) => `${f.label}=${f.status}${f.error ? ` (${f.error})` : ""}`)
    .join(", ");
  container.append(
    el("p", "status-line", `status: ${payload.status} · ${statuses}`),
  );
  if (!payload.results) return;

  container.append(renderTableCaption(payload.results));
  container.append(renderResultsTable(payload.results));

  const charts = el("div", "charts");
  for (const metricId of tableMetricIds(payload.results)) {
    const chart = renderBarChart(payload.results, metricId);
    const save = el("button", "chart-save", "save chart");
    save.addEventListener("click", () =>
      downloadChart(chart, `${payload.experiment_id}_${metricId}.svg`),
    );
    const box = el("div", "chart-box");
    box.append(chart, save);
    charts.append(box);
  }
  const pr = renderPrCurve(payload.results);
  if (pr) {
    const save = el("button", "chart-save", "save chart");
    save.addEventListener("click", () =>
      downloadChart(pr, `${payload.experiment_id}_pr_curve.svg`),
    );
    const box = el("div", "chart-box");
    box.append(pr, save);
    charts.append(box);
  }
  container.append(charts);
}

async function experimentView(experimentId: string): Promise<void> {
  root.replaceChildren(el("h2", "", `Experiment ${experimentId}`));

  const controls = el("div", "controls");
  const dashboard = el("div", "dashboard");

  const execute = el("button", "primary", "execute");
  execute.addEventListener("click", async () => {
    try {
      await api.execute(experimentId);
      await pollExperiment(experimentId, (p) => renderDashboard(dashboard, p));
    } catch (err) {
      showError(err);
    }
  });
  controls.append(execute);

  const addPanel = el("div", "add-panel");
  const algoSelect = el("select");
  for (const algorithm of algorithms) {
    const opt = el("option", "", algorithm.display_name);
    opt.value = algorithm.algorithm_id;
    algoSelect.append(opt);
  }
  const addFieldsBox = el("span", "add-fields");
  let addFields = schemaToFields(algorithms[0], []);
  const refreshAddFields = () => {
    const algorithm = algorithms.find((a) => a.algorithm_id === algoSelect.value)!;
    addFields = schemaToFields(algorithm, []);
    addFieldsBox.replaceChildren(renderFields(addFields));
  };
  algoSelect.addEventListener("change", refreshAddFields);
  const addButton = el("button", "", "add algorithm");
  addButton.addEventListener("click", async () => {
    try {
      const params = Object.fromEntries(addFields.map((f) => [f.name, f.value]));
      await api.addFusion(experimentId, { algorithm: algoSelect.value, params });
      await pollExperiment(experimentId, (p) => renderDashboard(dashboard, p));
    } catch (err) {
      showError(err);
    }
  });
  addPanel.append(algoSelect, addFieldsBox, addButton);
  controls.append(addPanel);

  const exports = el("div", "export-buttons");
  for (const format of ["latex", "trec", "csv", "bundle"]) {
    const link = el("a", "export-link", format);
    link.href = api.exportUrl(experimentId, format);
    link.target = "_blank";
    exports.append(link);
  }
  controls.append(exports);

  root.append(controls, dashboard);
  try {
    await pollExperiment(experimentId, (p) => renderDashboard(dashboard, p));
  } catch (err) {
    showError(err);
  }
}

// --- experiment list ---

async function experimentListView(): Promise<void> {
  root.replaceChildren(el("h2", "", "Experiments"));
  const experiments = await api.listExperiments();
  const list = el("ul", "experiment-list");
  for (const exp of experiments) {
    const item = el("li");
    const link = el("a", "", `${exp.experiment_id} [${exp.status}]`);
    link.href = `#/experiment/${exp.experiment_id}`;
    const labels = exp.fusions.map((f) => f.label).join(", ");
    item.append(link, el("span", "", ` ${labels}`));
    list.append(item);
  }
  root.append(list);
}

// --- routing ---

async function route(): Promise<void> {
  const hash = location.hash || "#/datasets";
  try {
    if (hash.startsWith("#/build/")) {
      await builderView(hash.slice("#/build/".length));
    } else if (hash.startsWith("#/experiment/")) {
      await experimentView(hash.slice("#/experiment/".length));
    } else if (hash === "#/experiments") {
      await experimentListView();
    } else {
      await datasetView();
    }
  } catch (err) {
    showError(err);
  }
}

async function start(): Promise<void> {
  [algorithms, metrics] = await Promise.all([
    api.listAlgorithms(),
    api.listMetrics(),
  ]);
  window.addEventListener("hashchange", route);
  await route();
}

start().catch(showError);
