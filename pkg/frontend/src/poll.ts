/**
 * Poll an experiment's results until every fusion spec reaches a terminal
 * state. Concurrent polls for the same experiment share one request loop.
 */

import { api } from "./api";
import type { ResultsPayload } from "./types";

const inflight = new Map<string, Promise<ResultsPayload>>();

export function isSettled(payload: ResultsPayload): boolean {
  return payload.fusions.every((f) => f.status !== "pending");
}

/**
 * Fetch the current results snapshot, de-duplicated: callers asking for the
 * same experiment while a request is outstanding share its response.
 */
export function fetchResults(experimentId: string): Promise<ResultsPayload> {
  const pending = inflight.get(experimentId);
  if (pending) return pending;
  const promise = api.results(experimentId).finally(() => {
    inflight.delete(experimentId);
  });
  inflight.set(experimentId, promise);
  return promise;
}

/**
 * Poll until settled, invoking onUpdate with each snapshot (including the
 * final one). Resolves with the terminal payload.
 */
export async function pollExperiment(
  experimentId: string,
  onUpdate: (payload: ResultsPayload) => void,
  intervalMs = 1000,
): Promise<ResultsPayload> {
  for (;;) {
    const payload = await fetchResults(experimentId);
    onUpdate(payload);
    if (isSettled(payload)) return payload;
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
