"""Deterministic probe traversal through a configured data-plane.

The simulator replays one probe packet from its origin host and logs
every switch-interface crossing on an integer tick clock (+1 per
crossing).  Arrivals are processed atomically in FIFO order: a switch's
ingress observation and all resulting egress observations (in port
order) are emitted before the next arrival is handled.  Ground-truth
data-paths come from an independent expansion of the forwarding
function, so the two can serve as oracles for each other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Deque, FrozenSet, List, Optional, Set, Tuple

from .forwarding import DROP, DataPlaneConfig, lookup
from .headers import HeaderValue
from .observations import EGRESS, INGRESS, Observation, ObservationLog
from .topology import DataPlane

# a data-path is a chained sequence of directed node pairs starting at a host
DataPath = Tuple[Tuple[str, str], ...]


class SimulationError(ValueError):
    """Invalid probe for the given data-plane."""


@dataclass(frozen=True)
class Probe:
    uid: str
    origin: str
    header: HeaderValue


@dataclass(frozen=True)
class SimResult:
    log: ObservationLog
    truth: FrozenSet[DataPath]
    loop_hit: bool


def hop_cutoff(d: DataPlane) -> int:
    """Directed-edge budget per packet copy: |V| * (|V| - 1).  A finite
    forwarding process always fits; exceeding it proves a cycle."""
    n = len(d.nodes)
    return n * (n - 1)


def simulate(d: DataPlane, cfg: DataPlaneConfig, p: Probe) -> SimResult:
    if p.origin not in d.hosts:
        raise SimulationError(f"probe origin {p.origin!r} is not a host")
    cutoff = hop_cutoff(d)
    entries: List[Observation] = []
    truth: Set[DataPath] = set()
    loop_hit = False
    tick = 0
    forwarded: Set[str] = set()  # forward-once bookkeeping

    first_switch, first_port = d.host_attachment(p.origin)
    # queue items: (switch, in_port, hops so far, path edges so far)
    queue: Deque[Tuple[str, int, int, DataPath]] = deque()
    queue.append((first_switch, first_port, 1, ((p.origin, first_switch),)))

    while queue:
        sw, in_port, hops, path = queue.popleft()
        tick += 1
        entries.append(Observation(sw, in_port, tick, p.uid, INGRESS))

        if cfg.forward_once and sw in forwarded:
            truth.add(path)  # later copy: logged at ingress, not re-sent
            continue
        outcome = lookup(d, cfg.table(sw), in_port, p.header)
        if outcome is DROP:
            truth.add(path)
            continue
        if hops + 1 > cutoff:
            loop_hit = True
            truth.add(path)  # truncated branch
            continue
        if cfg.forward_once:
            forwarded.add(sw)
        for port in sorted(outcome):
            tick += 1
            entries.append(Observation(sw, port, tick, p.uid, EGRESS))
            nxt = d.neighbor_via(sw, port)
            new_path = path + ((sw, nxt),)
            if nxt in d.hosts:
                truth.add(new_path)
            else:
                queue.append((nxt, d.port_toward(nxt, sw), hops + 1, new_path))

    return SimResult(
        log=ObservationLog.from_iterable(entries),
        truth=frozenset(truth),
        loop_hit=loop_hit,
    )


@dataclass(frozen=True)
class GroundTruth:
    """Result of expanding the forwarding function directly."""

    paths: FrozenSet[DataPath]
    repeated_edges: FrozenSet[Tuple[str, str]]

    @property
    def has_loop(self) -> bool:
        return bool(self.repeated_edges)


def ground_truth_paths(
    d: DataPlane, cfg: DataPlaneConfig, host: str, hdr: HeaderValue
) -> GroundTruth:
    """Expand the forwarding decision from (host, hdr) without simulating.

    Stateless configurations are expanded depth-first, branching per
    output port; a branch ends at a host, at a Drop, or when a directed
    edge repeats on it (reported as a loop).  Forward-once
    configurations are expanded in the same breadth-first arrival order
    the traffic would take, ending a branch at the first switch that has
    already forwarded.
    """
    if host not in d.hosts:
        raise SimulationError(f"{host!r} is not a host")
    first_switch, first_port = d.host_attachment(host)
    paths: Set[DataPath] = set()
    repeats: Set[Tuple[str, str]] = set()

    if cfg.forward_once:
        forwarded: Set[str] = set()
        queue: Deque[Tuple[str, int, DataPath]] = deque()
        queue.append((first_switch, first_port, ((host, first_switch),)))
        while queue:
            sw, in_port, path = queue.popleft()
            if sw in forwarded:
                paths.add(path)
                continue
            outcome = lookup(d, cfg.table(sw), in_port, hdr)
            if outcome is DROP:
                paths.add(path)
                continue
            forwarded.add(sw)
            for port in sorted(outcome):
                nxt = d.neighbor_via(sw, port)
                new_path = path + ((sw, nxt),)
                if nxt in d.hosts:
                    paths.add(new_path)
                else:
                    queue.append((nxt, d.port_toward(nxt, sw), new_path))
        return GroundTruth(frozenset(paths), frozenset())

    def expand(sw: str, in_port: int, path: DataPath, seen: FrozenSet[Tuple[str, str]]) -> None:
        outcome = lookup(d, cfg.table(sw), in_port, hdr)
        if outcome is DROP:
            paths.add(path)
            return
        for port in sorted(outcome):
            nxt = d.neighbor_via(sw, port)
            edge = (sw, nxt)
            if edge in seen:
                repeats.add(edge)
                paths.add(path)  # truncated at the repeat
                continue
            new_path = path + (edge,)
            if nxt in d.hosts:
                paths.add(new_path)
            else:
                expand(nxt, d.port_toward(nxt, sw), new_path, seen | {edge})

    first_edge = (host, first_switch)
    expand(first_switch, first_port, (first_edge,), frozenset({first_edge}))
    return GroundTruth(frozenset(paths), frozenset(repeats))
