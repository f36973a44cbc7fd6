/**
 * Canned API payloads used across the test suites. Values mimic what the
 * service returns for a small two-run experiment.
 */

import type {
  AlgorithmInfo,
  ExperimentRecord,
  Results,
  ResultsPayload,
  SignificanceCell,
  TestResult,
} from "../src/types";

function test(statistic: number, p: number): TestResult {
  return {
    test_id: "t_test",
    statistic,
    p_value: p,
    n_effective: 8,
    degenerate: false,
    caveat: "",
  };
}

function sig(baseline: string, tP: number, wP: number): SignificanceCell {
  return {
    baseline,
    t_test: test(2.3069560245283264, tP),
    wilcoxon: {
      ...test(3, wP),
      test_id: "wilcoxon",
      caveat:
        "the Wilcoxon signed-rank test has been argued to be unsuitable for IR evaluation",
    },
  };
}

const IPREC_LEVELS = [
  "0.00", "0.10", "0.20", "0.30", "0.40", "0.50",
  "0.60", "0.70", "0.80", "0.90", "1.00",
];

function iprec(values: number[]): Record<string, number> {
  const out: Record<string, number> = {};
  IPREC_LEVELS.forEach((level, i) => {
    out[`iprec_at_recall_${level}`] = values[i];
  });
  return out;
}

export const RESULTS_FIXTURE: Results = {
  metric_ids: [
    "map", "P_5", "ndcg",
    ...IPREC_LEVELS.map((l) => `iprec_at_recall_${l}`),
  ],
  test_topics: ["301", "302", "303", "304"],
  baseline: "s2",
  consistent: true,
  rows: [
    {
      name: "s",
      kind: "component",
      aggregates: {
        map: 0.5,
        P_5: 0.4,
        ndcg: 0.6132899021047992,
        ...iprec([1, 0.9, 0.82, 0.7, 0.61, 0.5, 0.44, 0.31, 0.22, 0.15, 0.1]),
      },
      significance: { map: sig("s2", 0.04213, 0.125), P_5: sig("s2", 0.2, 0.5) },
    },
    {
      name: "s2",
      kind: "component",
      aggregates: {
        map: 0.7555555555555555,
        P_5: 0.6,
        ndcg: 0.801234567890123,
        ...iprec([1, 0.95, 0.9, 0.81, 0.72, 0.66, 0.5, 0.42, 0.33, 0.21, 0.12]),
      },
    },
    {
      name: "combsum",
      kind: "fusion",
      status: "done",
      aggregates: {
        map: 0.7222222222222222,
        P_5: 0.65,
        ndcg: 0.83,
        ...iprec([1, 0.97, 0.91, 0.84, 0.75, 0.68, 0.55, 0.45, 0.36, 0.24, 0.13]),
      },
      significance: { map: sig("s2", 0.0042, 0.0625), P_5: sig("s2", 0.031, 0.25) },
    },
    {
      name: "best_component",
      kind: "synthetic",
      aggregates: { map: 0.7555555555555555, P_5: 0.6, ndcg: 0.801234567890123 },
    },
    {
      name: "mean_component",
      kind: "synthetic",
      aggregates: { map: 0.6277777777777778, P_5: 0.5, ndcg: 0.7072622350 },
    },
    {
      name: "median_component",
      kind: "synthetic",
      aggregates: { map: 0.5, P_5: 0.4, ndcg: 0.6132899021047992 },
    },
  ],
};

export const RESULTS_PAYLOAD: ResultsPayload = {
  experiment_id: "abc123",
  status: "done",
  split: { kind: "kfold", train: [], test: ["301", "302", "303", "304"],
           folds: [["301", "303"], ["302", "304"]] },
  baseline: "s2",
  fusions: [{ label: "combsum", status: "done", error: null }],
  results: RESULTS_FIXTURE,
};

export const ALGORITHMS_FIXTURE: AlgorithmInfo[] = [
  {
    algorithm_id: "combsum",
    display_name: "CombSum",
    requires_training: false,
    params: [],
  },
  {
    algorithm_id: "linear",
    display_name: "Linear Combination",
    requires_training: false,
    params: [
      {
        name: "weights",
        type: "map",
        default: null,
        description: "non-negative weight per run tag; at least one positive",
      },
    ],
  },
  {
    algorithm_id: "probfuse",
    display_name: "ProbFuse",
    requires_training: true,
    params: [
      { name: "x", type: "int", default: 25, minimum: 1, description: "number of segments" },
      { name: "variant", type: "enum", default: "all", choices: ["all", "judged"] },
    ],
  },
  {
    algorithm_id: "slidefuse",
    display_name: "SlideFuse",
    requires_training: true,
    params: [
      { name: "a", type: "int", default: 5, minimum: 0, description: "window half-width" },
    ],
  },
];

export const EXPERIMENT_RECORD: ExperimentRecord = {
  experiment_id: "abc123",
  dataset_id: "ds01",
  run_tags: ["s", "s2"],
  split: {
    kind: "kfold",
    train: [],
    test: ["301", "302", "303", "304"],
    folds: [["301", "303"], ["302", "304"]],
  },
  fusions: [
    { algorithm: "combsum", params: {}, label: "combsum", status: "pending", error: null },
    {
      algorithm: "probfuse",
      params: { x: 2, variant: "all" },
      label: "probfuse(x=2)",
      status: "pending",
      error: null,
    },
  ],
  metrics: ["map", "P_5", "ndcg"],
  baseline: "s2",
  status: "pending",
  results: null,
};

/** Stub fetch with canned JSON responses keyed by "METHOD path". */
export function mockFetch(
  routes: Record<string, unknown | ((body: unknown) => unknown)>,
): { calls: { method: string; path: string; body: unknown }[] } {
  const calls: { method: string; path: string; body: unknown }[] = [];
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const path = String(input);
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ method, path, body });
    const handler = routes[`${method} ${path}`];
    if (handler === undefined) {
      return new Response(JSON.stringify({ error: `no route ${method} ${path}` }), {
        status: 404,
      });
    }
    const payload = typeof handler === "function" ? handler(body) : handler;
    return new Response(JSON.stringify(payload), { status: 200 });
  }) as typeof fetch;
  return { calls };
}
