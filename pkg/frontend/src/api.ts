/**
 * Thin typed client for the experiment API. Every view goes through these
 * calls; nothing in the console computes or caches metric values itself.
 */

import type {
  AlgorithmInfo,
  DatasetSummary,
  ExperimentDefinition,
  ExperimentRecord,
  ExperimentSummary,
  FusionSpecInput,
  MetricInfo,
  ResultsPayload,
} from "./types";

export class ApiError extends Error {
  status: number;
  field?: string;

  constructor(status: number, message: string, field?: string) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let message = resp.statusText;
    let field: string | undefined;
    try {
      const body = await resp.json();
      message = body.error ?? message;
      field = body.field;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, message, field);
  }
  return resp.json() as Promise<T>;
}

export const api = {
  listAlgorithms: () => request<AlgorithmInfo[]>("/api/algorithms"),
  listMetrics: () => request<MetricInfo[]>("/api/metrics"),
  listDatasets: () => request<DatasetSummary[]>("/api/datasets"),

  uploadDataset: (name: string, runs: string[], qrels: string) =>
    request<DatasetSummary>("/api/datasets", {
      method: "POST",
      body: JSON.stringify({ name, runs, qrels }),
    }),

  createExperiment: (definition: ExperimentDefinition) =>
    request<ExperimentRecord>("/api/experiments", {
      method: "POST",
      body: JSON.stringify(definition),
    }),

  listExperiments: () => request<ExperimentSummary[]>("/api/experiments"),

  execute: (experimentId: string) =>
    request<{ experiment_id: string; status: string }>(
      `/api/experiments/${experimentId}/execute`,
      { method: "POST" },
    ),

  addFusion: (experimentId: string, spec: FusionSpecInput) =>
    request<{ experiment_id: string; status: string }>(
      `/api/experiments/${experimentId}/fusions`,
      { method: "POST", body: JSON.stringify(spec) },
    ),

  results: (experimentId: string) =>
    request<ResultsPayload>(`/api/experiments/${experimentId}/results`),

  exportUrl: (experimentId: string, format: string, spec?: string) => {
    const params = new URLSearchParams({ format });
    if (spec) params.set("spec", spec);
    return `/api/experiments/${experimentId}/export?${params}`;
  },
};
