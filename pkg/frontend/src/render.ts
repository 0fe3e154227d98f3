/** DOM builders: SVG topology view and the flow-tree card. */

import type { CaseDoc } from "./types.js";
import { RenderedTree, caseSummary, flattenCase } from "./tree.js";
import { TopoModel } from "./topology.js";

const SVG = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

export function renderTopology(model: TopoModel, width = 640, height = 420): SVGSVGElement {
  const svg = svgEl("svg", { width, height, class: "topo" });
  const pos = new Map(model.nodes.map((n) => [n.id, n]));
  for (const e of model.edges) {
    const a = pos.get(e.a);
    const b = pos.get(e.b);
    if (!a || !b) continue;
    svg.appendChild(
      svgEl("line", { x1: a.x, y1: a.y, x2: b.x, y2: b.y, class: "topo-link" }),
    );
    // port labels sit close to their endpoint
    const t = 0.18;
    const pa = svgEl("text", {
      x: a.x + (b.x - a.x) * t,
      y: a.y + (b.y - a.y) * t,
      class: "port-label",
    });
    pa.textContent = String(e.portA);
    const pb = svgEl("text", {
      x: b.x + (a.x - b.x) * t,
      y: b.y + (a.y - b.y) * t,
      class: "port-label",
    });
    pb.textContent = String(e.portB);
    svg.appendChild(pa);
    svg.appendChild(pb);
  }
  for (const n of model.nodes) {
    const g = svgEl("g", { class: `topo-node ${n.kind}` });
    if (n.kind === "host") {
      g.appendChild(svgEl("rect", { x: n.x - 13, y: n.y - 13, width: 26, height: 26, rx: 4 }));
    } else {
      g.appendChild(svgEl("circle", { cx: n.x, cy: n.y, r: 16 }));
    }
    const label = svgEl("text", { x: n.x, y: n.y + 4, "text-anchor": "middle" });
    label.textContent = n.id;
    g.appendChild(label);
    svg.appendChild(g);
  }
  return svg;
}

/** Nested-list rendering of a flow tree: ti inside the node box, te on
 * the incoming edge, badges on the offending node/edge. */
export function renderTreeCard(c: CaseDoc): HTMLElement {
  const card = document.createElement("section");
  card.className = `result-card status-${c.status}`;
  card.dataset.uid = c.uid;

  const head = document.createElement("header");
  const title = document.createElement("strong");
  title.textContent = `probe ${c.uid.slice(0, 8)} from ${c.host}`;
  const badge = document.createElement("span");
  badge.className = `status-badge ${c.status}`;
  badge.textContent = c.status;
  const summary = document.createElement("span");
  summary.className = "summary";
  summary.textContent = caseSummary(c);
  head.append(title, badge, summary);
  card.appendChild(head);

  const flat = flattenCase(c);
  if (flat.nodes.length > 0) {
    card.appendChild(renderFlat(flat));
  }
  return card;
}

function renderFlat(flat: RenderedTree): HTMLElement {
  const byParent = new Map<string | null, typeof flat.edges>();
  for (const e of flat.edges) {
    const list = byParent.get(e.from) ?? [];
    list.push(e);
    byParent.set(e.from, list);
  }
  const nodeById = new Map(flat.nodes.map((n) => [n.id, n]));

  const build = (id: string, te: number | null, edgeBadge: boolean): HTMLLIElement => {
    const node = nodeById.get(id);
    const li = document.createElement("li");
    if (!node) return li;
    const row = document.createElement("div");
    row.className = "tree-row";
    if (te !== null) {
      const teSpan = document.createElement("span");
      teSpan.className = edgeBadge ? "te edge-error" : "te";
      teSpan.textContent = `te=${te}`;
      row.appendChild(teSpan);
    }
    const box = document.createElement("span");
    box.className = node.badge ? `tree-node node-error-${node.badge}` : "tree-node";
    box.dataset.nodeId = node.id;
    box.textContent = node.ti !== null ? `${node.label} (ti=${node.ti})` : node.label;
    row.appendChild(box);
    if (node.badge) {
      const mark = document.createElement("span");
      mark.className = "error-badge";
      mark.textContent = node.badge === "loop" ? "⟳ loop" : "✂ disconnected";
      row.appendChild(mark);
    }
    li.appendChild(row);
    const children = byParent.get(id) ?? [];
    if (children.length > 0) {
      const ul = document.createElement("ul");
      for (const e of children) ul.appendChild(build(e.to, e.te, e.badge));
      li.appendChild(ul);
    }
    return li;
  };

  const rootUl = document.createElement("ul");
  rootUl.className = "flow-tree";
  rootUl.appendChild(build("n0", null, false));
  return rootUl;
}
