"""Shared fixtures: the reference plane, canned rule sets, and random
plane/configuration generators used by the oracle-equivalence and
fault-detection tests."""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

import pytest

from datapaths.forwarding import DataPlaneConfig, FlowRule, Match, RuleTable, install
from datapaths.headers import (
    HeaderSchema,
    HeaderValue,
    TrafficType,
    header_from_fields,
    match_all,
)
from datapaths.topology import DataPlane, Link, example_plane, validate

# 48-bit schema used by the worked examples: a 32-bit address plus a
# 16-bit port, so "dstTCP=80" pins global bit positions 42 and 44
SCHEMA48 = HeaderSchema((("dstIP", 32), ("dstTCP", 16)))


@pytest.fixture
def fig_plane() -> DataPlane:
    return example_plane()


@pytest.fixture
def hdr80() -> HeaderValue:
    return header_from_fields(SCHEMA48, {"dstTCP": 80})


def solid_path_config(d: DataPlane, schema: HeaderSchema = SCHEMA48) -> DataPlaneConfig:
    """Rules realizing the single chain h1 -> s1 -> s2 -> h2 for dstTCP=80."""
    t80 = TrafficType(schema, (("dstTCP", 80, 0xFFFF),))
    tables = {s: RuleTable(s) for s in d.switches}
    tables["s1"] = install(d, tables["s1"], FlowRule(10, Match(t80), frozenset({2})))
    tables["s2"] = install(d, tables["s2"], FlowRule(10, Match(t80), frozenset({1})))
    return DataPlaneConfig(tables)


@pytest.fixture
def solid_cfg(fig_plane) -> DataPlaneConfig:
    return solid_path_config(fig_plane)


# -- random generators -----------------------------------------------------


def random_plane(
    rng: random.Random,
    n_hosts: Optional[int] = None,
    n_switches: Optional[int] = None,
) -> DataPlane:
    """A valid random plane: a switch spanning tree plus extra switch
    links, hosts attached so every switch reaches degree >= 2."""
    if n_hosts is None:
        n_hosts = rng.randint(2, 6)
    if n_switches is None:
        n_switches = rng.randint(1, 6)
    switches = [f"s{i}" for i in range(1, n_switches + 1)]
    hosts = [f"h{i}" for i in range(1, n_hosts + 1)]
    next_port: Dict[str, int] = {n: 1 for n in switches + hosts}
    links: List[Link] = []

    def connect(a: str, b: str) -> None:
        links.append(Link(a, next_port[a], b, next_port[b]))
        next_port[a] += 1
        next_port[b] += 1

    # random spanning tree over the switches
    order = switches[:]
    rng.shuffle(order)
    for idx in range(1, len(order)):
        connect(order[idx], rng.choice(order[:idx]))

    # sprinkle extra switch-switch links
    pairs = {frozenset((l.a, l.b)) for l in links}
    for i in range(n_switches):
        for j in range(i + 1, n_switches):
            pair = frozenset((switches[i], switches[j]))
            if pair not in pairs and rng.random() < 0.25:
                connect(switches[i], switches[j])
                pairs.add(pair)

    # hosts: deficient switches first, remainder at random
    degree = {s: 0 for s in switches}
    for l in links:
        for end in (l.a, l.b):
            if end in degree:
                degree[end] += 1
    targets = [s for s in switches if degree[s] < 2]
    for h in hosts:
        s = targets.pop(0) if targets else rng.choice(switches)
        connect(h, s)
        degree[s] += 1

    # any switch still short of degree 2 gets another switch link
    for s in switches:
        if degree[s] < 2:
            candidates = [
                o for o in switches
                if o != s and frozenset((s, o)) not in pairs
            ]
            if candidates:
                o = rng.choice(candidates)
                connect(s, o)
                pairs.add(frozenset((s, o)))
                degree[s] += 1
                degree[o] += 1

    plane = DataPlane(frozenset(hosts), frozenset(switches), tuple(links))
    report = validate(plane)
    assert report.ok, report.violations
    return plane


def random_header(rng: random.Random, schema: HeaderSchema) -> HeaderValue:
    return HeaderValue(schema, rng.getrandbits(schema.total_width))


def random_loopfree_config(
    rng: random.Random, d: DataPlane, schema: HeaderSchema
) -> DataPlaneConfig:
    """Every rule only outputs toward strictly later-ranked switches or
    hosts, so any forwarding run visits switches in increasing rank and
    can never revisit an edge."""
    rank = {s: i for i, s in enumerate(sorted(d.switches, key=lambda _: rng.random()))}
    tables = {}
    for s in d.switches:
        table = RuleTable(s)
        ports = d.ports(s)
        safe = [
            p for p, peer in ports.items()
            if peer in d.hosts or rank[peer] > rank[s]
        ]
        n_rules = rng.randint(0, 3)
        for _ in range(n_rules):
            if not safe or rng.random() < 0.2:
                out = None  # explicit drop rule
            else:
                out = frozenset(rng.sample(safe, rng.randint(1, len(safe))))
            in_port = rng.choice(list(ports)) if rng.random() < 0.3 else None
            table = install(
                d, table, FlowRule(rng.randint(0, 5), Match(match_all(schema), in_port), out)
            )
        tables[s] = table
    return DataPlaneConfig(tables)


def random_cyclic_config(
    rng: random.Random, d: DataPlane, schema: HeaderSchema, origin: str
) -> Optional[DataPlaneConfig]:
    """Route the probe from its access switch onto a switch cycle that
    it then circles forever.  The cycle must have length >= 3: a
    two-switch bounce would hairpin on the shared link and be dropped.
    Returns None when no cycle is reachable from the origin."""
    import networkx as nx

    g = nx.Graph(
        (l.a, l.b) for l in d.links if l.a in d.switches and l.b in d.switches
    )
    start, _ = d.host_attachment(origin)
    if start not in g:
        return None
    reachable = nx.node_connected_component(g, start)
    cycles = [c for c in nx.cycle_basis(g.subgraph(reachable)) if len(c) >= 3]
    if not cycles:
        return None
    cycle = rng.choice(cycles)
    # shortest approach path; only its last node lies on the cycle
    paths = nx.single_source_shortest_path(g, start)
    entry = min(cycle, key=lambda s: len(paths[s]))
    approach = paths[entry]
    k = cycle.index(entry)
    ring = cycle[k:] + cycle[:k]

    tables = {s: RuleTable(s) for s in d.switches}

    def set_rule(s: str, nxt: str) -> None:
        tables[s] = install(
            d, tables[s],
            FlowRule(0, Match(match_all(schema)), frozenset({d.port_toward(s, nxt)})),
        )

    for i in range(len(approach) - 1):
        set_rule(approach[i], approach[i + 1])
    for i, s in enumerate(ring):
        set_rule(s, ring[(i + 1) % len(ring)])
    return DataPlaneConfig(tables)


def chain_plane(length: int) -> Tuple[DataPlane, DataPlaneConfig, str, str]:
    """A pure chain h_in - s1 - ... - s_n - h_out with rules pushing
    every packet down the chain; data-path length is length (edges),
    using length-1 switches."""
    n_sw = length - 1
    assert n_sw >= 1
    switches = [f"s{i}" for i in range(1, n_sw + 1)]
    links = [Link("hin", 1, "s1", 1)]
    for i in range(1, n_sw):
        links.append(Link(switches[i - 1], 2, switches[i], 1))
    links.append(Link(switches[-1], 2, "hout", 1))
    d = DataPlane(frozenset({"hin", "hout"}), frozenset(switches), tuple(links))
    assert validate(d).ok
    tables = {}
    for s in switches:
        tables[s] = install(
            d, RuleTable(s), FlowRule(0, Match(match_all(SCHEMA48)), frozenset({2}))
        )
    return d, DataPlaneConfig(tables), "hin", "hout"
