/** Thin fetch client for the discovery service, plus the pure request
 * helpers the probe form uses (tested without a network). */

import type {
  DiscoverRequestBody,
  DiscoverResponse,
  DryRunResponse,
  ProbeHistoryEntry,
  TopologyDoc,
} from "./types.js";

export interface ProbeFormState {
  sources: string[];
  filter: string;
  backend: "simulate" | "log";
  log: string;
}

export function buildRequestBody(form: ProbeFormState): DiscoverRequestBody {
  const body: DiscoverRequestBody = {
    sources: form.sources,
    filter: form.filter.trim(),
    backend: form.backend,
  };
  if (form.backend === "log") {
    body.log = form.log;
  }
  return body;
}

/** Cloning a history entry reproduces its exact request body. */
export function cloneRequest(entry: ProbeHistoryEntry): ProbeFormState {
  return {
    sources: [...entry.request.sources],
    filter: entry.request.filter,
    backend: entry.request.backend === "log" ? "log" : "simulate",
    log: "",
  };
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function check<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const doc = await resp.json();
      if (doc && typeof doc.detail === "string") detail = doc.detail;
      else if (doc && doc.detail) detail = JSON.stringify(doc.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private base = "") {}

  getTopology(): Promise<TopologyDoc> {
    return fetch(`${this.base}/topology`).then((r) => check<TopologyDoc>(r));
  }

  discover(body: DiscoverRequestBody): Promise<DiscoverResponse> {
    return fetch(`${this.base}/discover`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => check<DiscoverResponse>(r));
  }

  dryRun(filter: string): Promise<DryRunResponse> {
    return fetch(`${this.base}/discover`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ filter, dry_run: true }),
    }).then((r) => check<DryRunResponse>(r));
  }

  probes(): Promise<{ probes: ProbeHistoryEntry[] }> {
    return fetch(`${this.base}/probes`).then((r) =>
      check<{ probes: ProbeHistoryEntry[] }>(r),
    );
  }

  probe(uid: string): Promise<ProbeHistoryEntry> {
    return fetch(`${this.base}/probes/${encodeURIComponent(uid)}`).then((r) =>
      check<ProbeHistoryEntry>(r),
    );
  }
}
