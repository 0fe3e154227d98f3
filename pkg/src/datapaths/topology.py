"""Data-plane topology model.

A data-plane is an undirected graph of hosts and switches.  Every link
attaches to each endpoint through a numbered port, and (node, port) pairs
are unique, so a port identifies its link.  Hosts hang off a single link;
switches carry at least two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Tuple


class TopologyError(ValueError):
    """Raised for malformed topology documents."""


class UnknownInterfaceError(KeyError):
    """Raised when a (node, port) pair does not exist in the data-plane."""


@dataclass(frozen=True)
class Link:
    """One undirected link, with the port it uses on each endpoint."""

    a: str
    port_a: int
    b: str
    port_b: int

    def endpoints(self) -> FrozenSet[str]:
        return frozenset((self.a, self.b))

    def other(self, node: str) -> str:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise ValueError(f"{node} is not an endpoint of {self}")


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate(): hard violations plus advisory warnings."""

    violations: Tuple[str, ...]
    warnings: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class DataPlane:
    hosts: FrozenSet[str]
    switches: FrozenSet[str]
    links: Tuple[Link, ...]
    # port map per node, derived once at construction
    _ports: Dict[str, Dict[int, str]] = field(
        default=None, compare=False, repr=False  # type: ignore[assignment]
    )

    def __post_init__(self) -> None:
        ports: Dict[str, Dict[int, str]] = {n: {} for n in self.hosts | self.switches}
        for ln in self.links:
            for node, port, peer in ((ln.a, ln.port_a, ln.b), (ln.b, ln.port_b, ln.a)):
                ports.setdefault(node, {})[port] = peer
        object.__setattr__(self, "_ports", ports)

    # -- queries -----------------------------------------------------------

    @property
    def nodes(self) -> FrozenSet[str]:
        return self.hosts | self.switches

    def is_host(self, name: str) -> bool:
        return name in self.hosts

    def is_switch(self, name: str) -> bool:
        return name in self.switches

    def ports(self, node: str) -> Dict[int, str]:
        """Map port number -> neighbor name for one node."""
        try:
            return dict(self._ports[node])
        except KeyError:
            raise UnknownInterfaceError(f"unknown node {node!r}") from None

    def degree(self, node: str) -> int:
        return len(self._ports.get(node, {}))

    def neighbor_via(self, node: str, port: int) -> str:
        """Follow the link attached at (node, port) to the far endpoint."""
        try:
            return self._ports[node][port]
        except KeyError:
            raise UnknownInterfaceError(f"no such interface ({node}, {port})") from None

    def port_toward(self, node: str, neighbor: str) -> int:
        """Port on `node` whose link reaches `neighbor`."""
        for port, peer in self._ports.get(node, {}).items():
            if peer == neighbor:
                return port
        raise UnknownInterfaceError(f"{node} has no link toward {neighbor}")

    def host_attachment(self, host: str) -> Tuple[str, int]:
        """The (switch, switch-side port) a host's single link reaches."""
        if host not in self.hosts:
            raise UnknownInterfaceError(f"{host!r} is not a host")
        for ln in self.links:
            if host in ln.endpoints():
                peer = ln.other(host)
                return peer, ln.port_b if peer == ln.b else ln.port_a
        raise UnknownInterfaceError(f"host {host!r} has no link")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "hosts": sorted(self.hosts),
            "switches": sorted(self.switches),
            "links": [
                {"a": ln.a, "port_a": ln.port_a, "b": ln.b, "port_b": ln.port_b}
                for ln in self.links
            ],
        }


def validate(d: DataPlane) -> ValidationReport:
    """Check every structural invariant; collect rather than raise.

    Connectivity of the whole graph is advisory only: an unreachable
    component is reported as a warning, never a violation.
    """
    bad: List[str] = []
    warn: List[str] = []

    if len(d.hosts) < 2:
        bad.append("2 <= |hosts| required")
    if len(d.switches) < 1:
        bad.append("1 <= |switches| required")
    overlap = d.hosts & d.switches
    if overlap:
        bad.append(f"names both host and switch: {sorted(overlap)}")

    seen_ports: set = set()
    seen_pairs: set = set()
    for ln in d.links:
        for node, port in ((ln.a, ln.port_a), (ln.b, ln.port_b)):
            if node not in d.hosts and node not in d.switches:
                bad.append(f"link endpoint {node!r} is not a declared node")
            if port < 1:
                bad.append(f"port must be a positive integer: ({node}, {port})")
            if (node, port) in seen_ports:
                bad.append(f"duplicate interface ({node}, {port})")
            seen_ports.add((node, port))
        if ln.a == ln.b:
            bad.append(f"self-link on {ln.a}")
        if ln.a in d.hosts and ln.b in d.hosts:
            bad.append(f"host-host edge {{{ln.a},{ln.b}}}")
        pair = ln.endpoints()
        if pair in seen_pairs:
            bad.append(f"multiple links between {sorted(pair)}")
        seen_pairs.add(pair)

    for h in sorted(d.hosts):
        if d.degree(h) != 1:
            bad.append(f"host {h} has degree {d.degree(h)}, expected exactly 1")
    for s in sorted(d.switches):
        if d.degree(s) < 2:
            bad.append(f"switch {s} has degree {d.degree(s)}, expected >= 2")

    if not bad and d.nodes:
        unreachable = _unreachable_from_first(d)
        if unreachable:
            warn.append(f"unreachable component: {sorted(unreachable)}")

    return ValidationReport(tuple(bad), tuple(warn))


def _unreachable_from_first(d: DataPlane) -> FrozenSet[str]:
    start = min(d.nodes)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for peer in d.ports(node).values():
            if peer not in seen:
                seen.add(peer)
                stack.append(peer)
    return d.nodes - seen


def parse_topology(text: str) -> DataPlane:
    """Parse a JSON topology document and validate it.

    Shape: {"hosts": [...], "switches": [...],
            "links": [{"a":, "port_a":, "b":, "port_b":}, ...]}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"syntax error at line {exc.lineno} col {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise TopologyError("topology document must be a JSON object")
    for key in ("hosts", "switches", "links"):
        if key not in doc:
            raise TopologyError(f"missing section {key!r}")
    hosts = doc["hosts"]
    switches = doc["switches"]
    if not all(isinstance(n, str) and n for n in hosts):
        raise TopologyError("hosts must be non-empty strings")
    if not all(isinstance(n, str) and n for n in switches):
        raise TopologyError("switches must be non-empty strings")
    if len(set(hosts)) != len(hosts) or len(set(switches)) != len(switches):
        raise TopologyError("duplicate node names")
    links = []
    for idx, rec in enumerate(doc["links"]):
        try:
            links.append(
                Link(
                    a=str(rec["a"]),
                    port_a=int(rec["port_a"]),
                    b=str(rec["b"]),
                    port_b=int(rec["port_b"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"links[{idx}]: {exc}") from None
    plane = DataPlane(frozenset(hosts), frozenset(switches), tuple(links))
    report = validate(plane)
    if not report.ok:
        raise TopologyError("; ".join(report.violations))
    return plane


def serialize_topology(d: DataPlane) -> str:
    """Render as the same line-diffable JSON shape parse_topology reads."""
    return json.dumps(d.to_dict(), indent=2) + "\n"


def example_plane() -> DataPlane:
    """Small reference plane: four hosts on a partially meshed square
    of four switches.  Used across the test-suite and docs."""
    links = (
        Link("h1", 1, "s1", 1),
        Link("h2", 1, "s2", 1),
        Link("h3", 1, "s3", 1),
        Link("h4", 1, "s4", 1),
        Link("s1", 2, "s2", 2),
        Link("s1", 3, "s3", 2),
        Link("s2", 3, "s3", 3),
        Link("s2", 4, "s4", 2),
        Link("s3", 4, "s4", 3),
    )
    return DataPlane(
        hosts=frozenset({"h1", "h2", "h3", "h4"}),
        switches=frozenset({"s1", "s2", "s3", "s4"}),
        links=links,
    )
