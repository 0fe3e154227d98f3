/** Wire shapes of the discovery service HTTP API. */

export interface TopologyLink {
  a: string;
  port_a: number;
  b: string;
  port_b: number;
}

export interface TopologyDoc {
  hosts: string[];
  switches: string[];
  links: TopologyLink[];
}

/** One flow-tree node: ti is the time the packet entered the node,
 * te (present on non-roots) the time it left the parent toward it. */
export interface TreeNodeDoc {
  label: string;
  ti: number | null;
  te?: number;
  children: TreeNodeDoc[];
}

export interface TreeDoc {
  host: string;
  root: TreeNodeDoc;
}

export interface ErrorObservation {
  node: string;
  iface: number;
  t: number;
}

export type CaseStatus = "ok" | "loop" | "disconnected" | "no-observations";

export interface CaseDoc {
  uid: string;
  host: string;
  status: CaseStatus;
  header: Record<string, number> | null;
  tree: TreeDoc | null;
  paths: [string, string][][];
  error_edge: [string, string] | null;
  error_observation: ErrorObservation | null;
  loop_hit: boolean;
  observation_span: number;
  analysis_seconds: number;
}

export interface DiscoverRequestBody {
  sources: string[];
  filter: string;
  backend: "simulate" | "log";
  log?: string;
  uids?: string[];
  cap?: number;
  dry_run?: boolean;
}

export interface DiscoverResponse {
  request: { sources: string[]; filter: string; backend: string };
  cases: CaseDoc[];
}

export interface DryRunResponse {
  ok: boolean;
  free_bits: number;
}

export interface ProbeHistoryEntry {
  request: { sources: string[]; filter: string; backend: string };
  case: CaseDoc;
}
