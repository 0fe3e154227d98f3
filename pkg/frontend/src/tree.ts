/** Flatten an API flow-tree case into render lists.
 *
 * The UI never computes paths itself: every node and edge below is a
 * direct projection of the service response, plus badge placement for
 * the two error verdicts.  Node ids encode the tree position so that
 * duplicate labels (a switch reached twice) stay distinct.
 */

import type { CaseDoc, TreeNodeDoc } from "./types.js";

export type Badge = "loop" | "disconnected" | null;

export interface RenderedNode {
  id: string;
  label: string;
  ti: number | null;
  depth: number;
  badge: Badge;
}

export interface RenderedEdge {
  from: string; // node id
  to: string; // node id
  fromLabel: string;
  toLabel: string;
  te: number | null;
  badge: boolean;
}

export interface RenderedTree {
  nodes: RenderedNode[];
  edges: RenderedEdge[];
}

interface Flat {
  id: string;
  doc: TreeNodeDoc;
  depth: number;
  parentId: string | null;
}

function walk(root: TreeNodeDoc): Flat[] {
  const out: Flat[] = [];
  const visit = (doc: TreeNodeDoc, id: string, depth: number, parentId: string | null) => {
    out.push({ id, doc, depth, parentId });
    doc.children.forEach((child, i) => visit(child, `${id}.${i}`, depth + 1, id));
  };
  visit(root, "n0", 0, null);
  return out;
}

/** The node to badge: the deepest (then last-visited) node carrying
 * the offending label.  For a loop that is the node that tried to
 * re-extend over the repeated edge; for a disconnection it is the
 * stranded observation's switch, when it appears in the partial tree. */
function badgeTarget(flats: Flat[], label: string): string | null {
  let best: Flat | null = null;
  for (const f of flats) {
    if (f.doc.label === label && (best === null || f.depth >= best.depth)) {
      best = f;
    }
  }
  return best ? best.id : null;
}

export function flattenCase(c: CaseDoc): RenderedTree {
  if (c.tree === null) {
    return { nodes: [], edges: [] };
  }
  const flats = walk(c.tree.root);
  const byId = new Map(flats.map((f) => [f.id, f]));

  let badgeNode: string | null = null;
  if (c.status === "loop" && c.error_edge) {
    badgeNode = badgeTarget(flats, c.error_edge[0]);
  } else if (c.status === "disconnected" && c.error_observation) {
    badgeNode = badgeTarget(flats, c.error_observation.node);
  }

  const nodes: RenderedNode[] = flats.map((f) => ({
    id: f.id,
    label: f.doc.label,
    ti: f.doc.ti,
    depth: f.depth,
    badge: f.id === badgeNode ? (c.status as Badge) : null,
  }));

  const edges: RenderedEdge[] = flats
    .filter((f) => f.parentId !== null)
    .map((f) => {
      const parent = byId.get(f.parentId as string) as Flat;
      const pair: [string, string] = [parent.doc.label, f.doc.label];
      const isErrorEdge =
        c.status === "loop" &&
        c.error_edge !== null &&
        pair[0] === c.error_edge[0] &&
        pair[1] === c.error_edge[1];
      return {
        from: parent.id,
        to: f.id,
        fromLabel: pair[0],
        toLabel: pair[1],
        te: f.doc.te ?? null,
        badge: isErrorEdge,
      };
    });

  return { nodes, edges };
}

/** Status line for the result card header. */
export function caseSummary(c: CaseDoc): string {
  switch (c.status) {
    case "ok":
      return `${c.paths.length} path(s) discovered`;
    case "loop":
      return c.error_edge
        ? `loop: edge ${c.error_edge[0]} → ${c.error_edge[1]} repeats`
        : "loop detected";
    case "disconnected":
      return c.error_observation
        ? `disconnected: (${c.error_observation.node}, ${c.error_observation.iface}, ` +
            `${c.error_observation.t}) has no attachment`
        : "disconnected path";
    case "no-observations":
      return "no observations for this probe";
  }
}
