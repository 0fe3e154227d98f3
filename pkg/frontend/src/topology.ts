/** Topology render model: nodes on a circle, links with per-endpoint
 * port labels.  Hosts and switches are visually distinct (filled vs
 * open); the model is pure so tests can check it against fixtures. */

import type { TopologyDoc } from "./types.js";

export interface TopoNode {
  id: string;
  kind: "host" | "switch";
  x: number;
  y: number;
}

export interface TopoEdge {
  a: string;
  b: string;
  portA: number;
  portB: number;
}

export interface TopoModel {
  nodes: TopoNode[];
  edges: TopoEdge[];
}

export function topologyModel(doc: TopologyDoc, width = 640, height = 420): TopoModel {
  // switches on an inner circle, hosts on an outer one, both sorted by
  // name so the layout is stable across reloads
  const cx = width / 2;
  const cy = height / 2;
  const rSwitch = Math.min(width, height) * 0.22;
  const rHost = Math.min(width, height) * 0.42;

  const ring = (names: string[], r: number, kind: "host" | "switch"): TopoNode[] =>
    [...names].sort().map((id, i) => {
      const angle = (2 * Math.PI * i) / Math.max(1, names.length) - Math.PI / 2;
      return {
        id,
        kind,
        x: Math.round(cx + r * Math.cos(angle)),
        y: Math.round(cy + r * Math.sin(angle)),
      };
    });

  return {
    nodes: [...ring(doc.switches, rSwitch, "switch"), ...ring(doc.hosts, rHost, "host")],
    edges: doc.links.map((l) => ({ a: l.a, b: l.b, portA: l.port_a, portB: l.port_b })),
  };
}
