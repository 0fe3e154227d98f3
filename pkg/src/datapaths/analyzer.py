"""Flow-tree reconstruction from interface observations.

Observations are replayed in time order onto a tree rooted at the
probing host.  Each observation (v, i, t) names a switch v, a port i
whose link reaches a neighbor u, and a timestamp.  Searching the tree
from the leaf level upward, the observation is applied as whichever of
these fits first:

  (a) ingress attach — a leaf-level node labelled v whose parent is
      labelled u, with no ingress time yet and an edge time before t,
      receives ti = t;
  (b) egress extend — a node labelled v with ti < t gains a child
      labelled u, with t recorded on the new edge;
  (c) arrival create — a node labelled u gains a child labelled v.  At
      the root (the host itself) the new node gets ti = t and the edge
      keeps the baseline time 0; deeper in the tree the edge records t
      and ti stays open until the matching ingress is seen.

Before extending, the directed edge about to be added is checked
against the root-to-node path; a repeat proves a forwarding loop.  An
observation that fits nowhere up to the root proves a disconnected
path.  Records tagged with a direction only try the compatible cases
("in": a and c; "out": b); untagged records try all three.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .headers import HeaderValue
from .observations import EGRESS, INGRESS, Observation, ObservationLog
from .topology import DataPlane

DataPath = Tuple[Tuple[str, str], ...]


class AnalysisError(Exception):
    """Base for the two analysis verdicts that stop reconstruction."""

    def __init__(self, message: str, partial: "FlowTree"):
        super().__init__(message)
        self.partial = partial


class LoopError(AnalysisError):
    """A directed edge repeats along one branch."""

    def __init__(self, edge: Tuple[str, str], partial: "FlowTree"):
        super().__init__(f"loop: directed edge {edge[0]}->{edge[1]} repeats", partial)
        self.edge = edge


class DisconnectedError(AnalysisError):
    """An observation has no chronologically valid attachment point."""

    def __init__(self, obs: Observation, partial: "FlowTree"):
        super().__init__(
            f"disconnected: no attachment for ({obs.node},{obs.iface},{obs.t})", partial
        )
        self.observation = obs


class FlowTreeNode:
    """Mutable during construction; treated as frozen afterwards.

    te_in is the egress time recorded on the edge from the parent
    (0 for the root's child, None while still unknown)."""

    __slots__ = ("label", "ti", "te_in", "parent", "children")

    def __init__(
        self,
        label: str,
        parent: Optional["FlowTreeNode"] = None,
        te_in: Optional[int] = None,
        ti: Optional[int] = None,
    ):
        self.label = label
        self.ti = ti
        self.te_in = te_in
        self.parent = parent
        self.children: List[FlowTreeNode] = []

    def path_edges(self) -> Set[Tuple[str, str]]:
        """Directed edges on the root-to-this-node path."""
        out: Set[Tuple[str, str]] = set()
        node = self
        while node.parent is not None:
            out.add((node.parent.label, node.label))
            node = node.parent
        return out

    def leaves(self) -> List["FlowTreeNode"]:
        if not self.children:
            return [self]
        out: List[FlowTreeNode] = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def depth(self) -> int:
        if not self.children:
            return 0
        return 1 + max(c.depth() for c in self.children)

    def shape(self):
        """Canonical (label, children-multiset) form for structural
        comparison, ignoring timestamps and sibling order."""
        return (self.label, tuple(sorted(c.shape() for c in self.children)))


@dataclass
class FlowTree:
    root: FlowTreeNode
    host: str
    header: Optional[HeaderValue] = None
    level_probes: int = 0  # levels examined across all observations


def build_flow_tree(
    d: DataPlane,
    host: str,
    obs: ObservationLog,
    header: Optional[HeaderValue] = None,
) -> FlowTree:
    """Reconstruct the flow tree for one probe's observation set.

    Raises LoopError or DisconnectedError (both carry the partial tree).
    """
    if host not in d.hosts:
        raise ValueError(f"{host!r} is not a host")
    root = FlowTreeNode(host)
    tree = FlowTree(root, host, header)

    for o in obs:
        v, i, t, direction = o.node, o.iface, o.t, o.direction
        u = d.neighbor_via(v, i)
        level = root.leaves()
        while True:
            tree.level_probes += 1
            placed = False
            if direction in (None, INGRESS):
                for n in level:
                    if (
                        n.label == v
                        and n.parent is not None
                        and n.parent.label == u
                        and n.ti is None
                        and n.te_in is not None
                        and n.te_in < t
                    ):
                        n.ti = t
                        placed = True
                        break
            if not placed and direction in (None, EGRESS):
                for n in level:
                    if n.label == v and n.ti is not None and n.ti < t:
                        if (v, u) in n.path_edges():
                            raise LoopError((v, u), tree)
                        child = FlowTreeNode(u, parent=n, te_in=t)
                        n.children.append(child)
                        placed = True
                        break
            if not placed and direction in (None, INGRESS):
                for n in level:
                    if n.label == u:
                        if (u, v) in n.path_edges():
                            raise LoopError((u, v), tree)
                        if n.parent is None:
                            child = FlowTreeNode(v, parent=n, te_in=0, ti=t)
                        else:
                            child = FlowTreeNode(v, parent=n, te_in=t)
                        n.children.append(child)
                        placed = True
                        break
            if placed:
                break
            parents: Dict[int, FlowTreeNode] = {
                id(n.parent): n.parent for n in level if n.parent is not None
            }
            if not parents:
                raise DisconnectedError(o, tree)
            level = list(parents.values())
    return tree


def extract_paths(tree: FlowTree) -> FrozenSet[DataPath]:
    """One directed root-to-leaf edge sequence per leaf.  A root-only
    tree has no edges, hence no paths."""
    paths: Set[DataPath] = set()
    for leaf in tree.root.leaves():
        if leaf is tree.root:
            continue
        edges: List[Tuple[str, str]] = []
        node = leaf
        while node.parent is not None:
            edges.append((node.parent.label, node.label))
            node = node.parent
        paths.add(tuple(reversed(edges)))
    return frozenset(paths)


def check_data_path(d: DataPlane, path: DataPath) -> None:
    """Assert the three structural path properties; used by tests."""
    if not path:
        raise ValueError("data-path must be non-empty")
    if path[0][0] not in d.hosts:
        raise ValueError("data-path must start at a host")
    for idx, (a, b) in enumerate(path):
        try:
            d.port_toward(a, b)
        except Exception:
            raise ValueError(f"({a},{b}) is not a data-plane edge")
        if idx + 1 < len(path) and path[idx + 1][0] != b:
            raise ValueError("consecutive edges do not chain")


def check_chronology(tree: FlowTree) -> None:
    """Assert parent-edge te < ti < each child-edge te at every node
    where the values are known; used by tests."""

    def rec(node: FlowTreeNode) -> None:
        if node.ti is not None and node.te_in is not None and not node.te_in < node.ti:
            raise AssertionError(f"te_in {node.te_in} !< ti {node.ti} at {node.label}")
        for c in node.children:
            if node.ti is not None and c.te_in is not None and c.te_in not in (0,):
                if not node.ti < c.te_in:
                    raise AssertionError(
                        f"ti {node.ti} !< child te {c.te_in} at {node.label}"
                    )
            rec(c)

    rec(tree.root)


# -- export / render -------------------------------------------------------


def tree_to_dict(tree: FlowTree) -> dict:
    def rec(node: FlowTreeNode, te_in: Optional[int]) -> dict:
        doc: dict = {"label": node.label, "ti": node.ti}
        if te_in is not None:
            doc["te"] = te_in
        doc["children"] = [rec(c, c.te_in) for c in node.children]
        return doc

    return {"host": tree.host, "root": rec(tree.root, None)}


def tree_from_dict(doc: dict) -> FlowTree:
    def rec(rec_doc: dict, parent: Optional[FlowTreeNode]) -> FlowTreeNode:
        node = FlowTreeNode(
            rec_doc["label"], parent=parent, te_in=rec_doc.get("te"), ti=rec_doc.get("ti")
        )
        for child_doc in rec_doc.get("children", []):
            node.children.append(rec(child_doc, node))
        return node

    root = rec(doc["root"], None)
    return FlowTree(root, doc.get("host", root.label))


def render_tree(tree: FlowTree) -> str:
    """Plain-text rendering, ti inside the node and te on each edge."""
    lines: List[str] = []

    def rec(node: FlowTreeNode, prefix: str, edge: str) -> None:
        ti = f" ti={node.ti}" if node.ti is not None else ""
        lines.append(f"{prefix}{edge}{node.label}{ti}")
        for c in node.children:
            te = f"--te={c.te_in}--> " if c.te_in is not None else "--> "
            rec(c, prefix + "  ", te)

    rec(tree.root, "", "")
    return "\n".join(lines) + "\n"
