/**
 * Experiment builder state: dataset, ordered run selection, fusion specs with
 * schema-driven parameters, split plan, metrics, baseline. The state turns
 * into an experiment definition document, and the created record's
 * materialized split is shown back to the user before execution.
 */

import { api } from "./api";
import { fieldsToParams, schemaToFields, type FieldSpec } from "./schemaToForm";
import type {
  AlgorithmInfo,
  ExperimentDefinition,
  ExperimentRecord,
  MaterializedSplit,
  SplitPlanInput,
} from "./types";

export interface PendingSpec {
  algorithm: AlgorithmInfo;
  fields: FieldSpec[];
}

export class ExperimentBuilder {
  datasetId = "";
  runTags: string[] = [];
  specs: PendingSpec[] = [];
  split: SplitPlanInput = { kind: "all_test" };
  metricIds: string[] = [];
  baseline = "best_component";

  /** Append a run tag, preserving selection order (interleave cares). */
  selectRun(tag: string): void {
    if (!this.runTags.includes(tag)) this.runTags.push(tag);
  }

  deselectRun(tag: string): void {
    this.runTags = this.runTags.filter((t) => t !== tag);
  }

  addAlgorithm(algorithm: AlgorithmInfo): PendingSpec {
    const spec = { algorithm, fields: schemaToFields(algorithm, this.runTags) };
    this.specs.push(spec);
    return spec;
  }

  removeSpec(spec: PendingSpec): void {
    this.specs = this.specs.filter((s) => s !== spec);
  }

  definition(): ExperimentDefinition {
    return {
      dataset: this.datasetId,
      runs: [...this.runTags],
      split: { ...this.split },
      fusions: this.specs.map((s) => ({
        algorithm: s.algorithm.algorithm_id,
        params: fieldsToParams(s.fields),
      })),
      metrics: [...this.metricIds],
      baseline: this.baseline,
    };
  }

  /** POST the definition; the response carries the materialized split. */
  submit(): Promise<ExperimentRecord> {
    return api.createExperiment(this.definition());
  }
}

/** Show the server-materialized train/test lists (and folds, if any). */
export function renderSplitPreview(split: MaterializedSplit): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "split-preview";

  const kind = document.createElement("p");
  kind.className = "split-kind";
  kind.textContent = `split: ${split.kind}`;
  panel.append(kind);

  const group = (label: string, topics: string[]) => {
    const p = document.createElement("p");
    p.className = `split-${label}`;
    p.textContent = `${label}: ${topics.join(" ")}`;
    return p;
  };
  panel.append(group("train", split.train), group("test", split.test));
  split.folds.forEach((fold, i) => {
    const p = group("fold", fold);
    p.classList.add(`split-fold-${i}`);
    panel.append(p);
  });
  return panel;
}
