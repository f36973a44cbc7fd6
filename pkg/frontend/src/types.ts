/**
 * Shapes of the JSON payloads exchanged with the HTTP API. The console
 * renders these values as delivered; it never computes metrics itself.
 */

export interface ParamSchema {
  name: string;
  type: "int" | "float" | "enum" | "map";
  default?: unknown;
  minimum?: number;
  choices?: string[];
  description?: string;
}

export interface AlgorithmInfo {
  algorithm_id: string;
  display_name: string;
  requires_training: boolean;
  params: ParamSchema[];
}

export interface MetricInfo {
  metric_id: string;
  display_name: string;
  needs_cutoff: boolean;
  extended: boolean;
}

export interface DatasetSummary {
  dataset_id: string;
  name: string;
  run_refs: Record<string, string>;
  qrels_ref: string;
  topic_ids: string[];
  provenance: string;
  coverage_warnings: string[];
  created: number;
}

export interface SplitPlanInput {
  kind: "all_test" | "holdout" | "kfold";
  train?: string[];
  test?: string[];
  k?: number;
  seed?: number;
}

export interface MaterializedSplit {
  kind: string;
  train: string[];
  test: string[];
  folds: string[][];
}

export interface FusionSpecInput {
  algorithm: string;
  params?: Record<string, unknown>;
}

export interface ExperimentDefinition {
  dataset: string;
  runs: string[];
  split: SplitPlanInput;
  fusions: FusionSpecInput[];
  metrics: string[];
  baseline?: string;
}

export interface TestResult {
  test_id: string;
  statistic: number;
  p_value: number;
  n_effective: number;
  degenerate: boolean;
  caveat: string;
}

export interface SignificanceCell {
  baseline: string;
  t_test: TestResult;
  wilcoxon: TestResult;
}

export interface ResultRow {
  name: string;
  kind: "component" | "fusion" | "synthetic";
  status?: string;
  error?: string | null;
  aggregates?: Record<string, number>;
  per_topic?: Record<string, Record<string, number>>;
  significance?: Record<string, SignificanceCell>;
}

export interface Results {
  metric_ids: string[];
  test_topics: string[];
  rows: ResultRow[];
  baseline: string;
  consistent: boolean;
}

export interface ExperimentRecord {
  experiment_id: string;
  dataset_id: string;
  run_tags: string[];
  split: MaterializedSplit;
  fusions: {
    algorithm: string;
    params: Record<string, unknown>;
    label: string;
    status: string;
    error: string | null;
  }[];
  metrics: string[];
  baseline: string;
  status: string;
  results: Results | null;
}

export interface ExperimentSummary {
  experiment_id: string;
  dataset_id: string;
  status: string;
  created: number;
  split: MaterializedSplit;
  fusions: { label: string; status: string }[];
}

export interface ResultsPayload {
  experiment_id: string;
  status: string;
  split: MaterializedSplit;
  baseline: string;
  fusions: { label: string; status: string; error: string | null }[];
  results: Results | null;
}
