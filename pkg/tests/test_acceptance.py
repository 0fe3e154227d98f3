"""Acceptance gate: one test per primary criterion, in order.

Each test prints a single summary line on success; pytest -v shows the
per-criterion pass/fail status.  Finite paths produced by the earlier
criteria are registered and re-checked against the worst-case length
bound by criterion 7.
"""

import random
import time

import networkx as nx
import pytest

from datapaths.analyzer import (
    DisconnectedError,
    LoopError,
    build_flow_tree,
    extract_paths,
)
from datapaths.forwarding import (
    DataPlaneConfig,
    FlowRule,
    Match,
    RuleTable,
    flood_config,
    install,
)
from datapaths.headers import TrafficType, header_from_fields, match_all
from datapaths.observations import Observation, ObservationLog
from datapaths.service import DiscoveryRequest, discover
from datapaths.simulate import Probe, ground_truth_paths, hop_cutoff, simulate
from datapaths.testgen import bounds, suite_for_header, suite_for_type, suite_size_for_type
from datapaths.topology import DataPlane, example_plane

from conftest import (
    SCHEMA48,
    chain_plane,
    random_cyclic_config,
    random_header,
    random_loopfree_config,
    random_plane,
    solid_path_config,
)

# (cutoff, path length) pairs registered by criteria 1-6, checked in 7
PATH_LENGTHS = []


def _register(plane, paths):
    cutoff = hop_cutoff(plane)
    for p in paths:
        PATH_LENGTHS.append((cutoff, len(p)))


def obs_log(triples, uid="u"):
    return ObservationLog.from_iterable(
        Observation(node, iface, t, uid) for node, iface, t in triples
    )


def test_criterion_1_single_path_example():
    plane = example_plane()
    log = obs_log([("s1", 1, 1), ("s1", 2, 2), ("s2", 2, 3), ("s2", 1, 4)])
    expected = {(("h1", "s1"), ("s1", "s2"), ("s2", "h2"))}

    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        paths = extract_paths(build_flow_tree(plane, "h1", log))
        best = min(best, time.perf_counter() - start)
    assert paths == expected
    assert best < 0.001, f"analysis took {best * 1000:.3f} ms"
    _register(plane, paths)
    print(f"[PASS] criterion 1: exact single path, {best * 1e6:.0f} us")


def test_criterion_2_cloned_path_example():
    plane = example_plane()
    log = obs_log(
        [("s1", 1, 1), ("s1", 2, 2), ("s1", 3, 3),
         ("s2", 2, 4), ("s3", 2, 5), ("s2", 1, 6), ("s3", 1, 7)]
    )
    tree = build_flow_tree(plane, "h1", log)
    paths = extract_paths(tree)
    assert paths == {
        (("h1", "s1"), ("s1", "s2"), ("s2", "h2")),
        (("h1", "s1"), ("s1", "s3"), ("s3", "h3")),
    }
    assert tree.root.shape() == (
        "h1",
        (("s1", (("s2", (("h2", ()),)), ("s3", (("h3", ()),)))),),
    )
    (s1,) = tree.root.children
    s2, s3 = sorted(s1.children, key=lambda n: n.label)
    (h2,) = s2.children
    (h3,) = s3.children
    tis = (s1.ti, s2.ti, s3.ti)
    tes = (s1.te_in, s2.te_in, s3.te_in, h2.te_in, h3.te_in)
    assert tis == (1, 4, 5)
    assert tes == (0, 2, 3, 6, 7)
    _register(plane, paths)
    print(f"[PASS] criterion 2: branch tree exact, TI {tis}, TE {tes}")


FLOOD_SHAPE = (
    "h1",
    (
        (
            "s1",
            (
                ("s2", (("h2", ()), ("s3", ()), ("s4", (("h4", ()), ("s3", ()))))),
                ("s3", (("h3", ()), ("s2", ()), ("s4", ()))),
            ),
        ),
    ),
)


def test_criterion_3_flooding_case_study():
    plane = example_plane()
    cfg = flood_config(plane, SCHEMA48)
    req = DiscoveryRequest(sources=("h1",), filter="dstIP=0 and dstTCP=22")
    result = discover(plane, req, cfg=cfg, schema=SCHEMA48)
    assert len(result.cases) == 1
    case = result.cases[0]
    assert case.status == "ok"

    def shape(doc):
        return (doc["label"], tuple(sorted(shape(c) for c in doc["children"])))

    assert shape(case.tree["root"]) == FLOOD_SHAPE
    _register(plane, [tuple(map(tuple, p)) for p in case.paths])
    print("[PASS] criterion 3: flood discovery tree matches the case-study shape")


def test_criterion_4_oracle_equivalence():
    rng = random.Random(1234)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        d = random_plane(rng)
        cfg = random_loopfree_config(rng, d, SCHEMA48)
        origin = rng.choice(sorted(d.hosts))
        hdr = random_header(rng, SCHEMA48)
        sim = simulate(d, cfg, Probe("u", origin, hdr))
        assert not sim.loop_hit
        paths = extract_paths(build_flow_tree(d, origin, sim.log))
        gt = ground_truth_paths(d, cfg, origin, hdr)
        assert not gt.has_loop
        if paths != gt.paths:
            mismatches += 1
        _register(d, paths)
    elapsed = time.perf_counter() - start
    assert mismatches == 0
    assert elapsed < 60.0, f"{elapsed:.1f} s"
    print(f"[PASS] criterion 4: 1000/1000 oracle matches in {elapsed:.1f} s")


def test_criterion_5_loop_detection():
    rng = random.Random(555)
    done = 0
    while done < 100:
        d = random_plane(rng, n_switches=rng.randint(3, 6))
        origin = rng.choice(sorted(d.hosts))
        cfg = random_cyclic_config(rng, d, SCHEMA48, origin)
        if cfg is None:
            continue  # no cycle reachable from this origin; next plane
        hdr = random_header(rng, SCHEMA48)
        sim = simulate(d, cfg, Probe("u", origin, hdr))
        assert sim.loop_hit, "cyclic configuration must hit the hop budget"
        gt = ground_truth_paths(d, cfg, origin, hdr)
        assert gt.has_loop
        with pytest.raises(LoopError) as exc:
            build_flow_tree(d, origin, sim.log)
        assert exc.value.edge in gt.repeated_edges
        done += 1
    print("[PASS] criterion 5: 100/100 loops flagged with a truly repeating edge")


def _disconnection_trial(rng):
    """A guaranteed three-switch chain sA -> sX -> sB with in_port-scoped
    rules, so deleting the interior switch sX's observations strands the
    downstream egress.  Returns None when the plane lacks such a chain."""
    d = random_plane(rng, n_switches=rng.randint(3, 6))
    origin = rng.choice(sorted(d.hosts))
    sa, host_port = d.host_attachment(origin)
    g = nx.Graph(
        (l.a, l.b) for l in d.links if l.a in d.switches and l.b in d.switches
    )
    if sa not in g:
        return None
    chains = [
        (sx, sb)
        for sx in g.neighbors(sa)
        for sb in g.neighbors(sx)
        if sb not in (sa, sx)
    ]
    if not chains:
        return None
    sx, sb = chains[rng.randrange(len(chains))]

    tables = {s: RuleTable(s) for s in d.switches}

    def rule(s, in_from_port, out_port):
        tables[s] = install(
            d, tables[s],
            FlowRule(0, Match(match_all(SCHEMA48), in_port=in_from_port),
                     frozenset({out_port})),
        )

    rule(sa, host_port, d.port_toward(sa, sx))
    rule(sx, d.port_toward(sx, sa), d.port_toward(sx, sb))
    in_b = d.port_toward(sb, sx)
    out_b = min(p for p in d.ports(sb) if p != in_b)
    rule(sb, in_b, out_b)
    return d, DataPlaneConfig(tables), origin, sx


def test_criterion_6_disconnection_detection():
    rng = random.Random(777)
    done = 0
    while done < 100:
        trial = _disconnection_trial(rng)
        if trial is None:
            continue
        d, cfg, origin, interior = trial
        hdr = random_header(rng, SCHEMA48)
        sim = simulate(d, cfg, Probe("u", origin, hdr))
        assert not sim.loop_hit
        # intact log reconstructs cleanly
        full = extract_paths(build_flow_tree(d, origin, sim.log))
        assert full == ground_truth_paths(d, cfg, origin, hdr).paths
        _register(d, full)
        # silence the interior switch entirely
        gapped = ObservationLog(
            tuple(o for o in sim.log if o.node != interior)
        )
        assert len(gapped) < len(sim.log)
        with pytest.raises(DisconnectedError):
            build_flow_tree(d, origin, gapped)
        done += 1
    print("[PASS] criterion 6: 100/100 silenced interior switches reported")


def test_criterion_7_bounds():
    for n_nodes in range(2, 9):
        # bounds depends only on the node count; stub planes suffice
        d = DataPlane(
            hosts=frozenset({"h1"}),
            switches=frozenset(f"s{i}" for i in range(n_nodes - 1)),
            links=(),
        )
        assert len(d.nodes) == n_nodes
        expected_len = n_nodes * (n_nodes - 1)
        assert bounds(d) == ((n_nodes - 1) ** expected_len, expected_len)
    fig = example_plane()
    assert bounds(fig) == (7**56, 56)
    assert PATH_LENGTHS, "criteria 1-6 must register their paths first"
    assert all(length <= cutoff for cutoff, length in PATH_LENGTHS)
    print(
        f"[PASS] criterion 7: bounds exact for |V| in 2..8; "
        f"{len(PATH_LENGTHS)} observed paths within budget"
    )


def test_criterion_8_suite_sizes():
    plane = example_plane()
    hdr = header_from_fields(SCHEMA48, {"dstTCP": 80})
    assert len(suite_for_header(plane, hdr)) == 4

    two_free = TrafficType(
        SCHEMA48, (("dstIP", 0, 0xFFFFFFFF), ("dstTCP", 0, 0xFFFC))
    )
    assert len(suite_for_type(plane, two_free)) == 16

    rng = random.Random(9)
    for _ in range(25):
        free = rng.randint(0, 40)
        mask48 = ((1 << 48) - 1) ^ ((1 << free) - 1)
        t = TrafficType(
            SCHEMA48,
            (("dstIP", 0, (mask48 >> 16) & 0xFFFFFFFF), ("dstTCP", 0, mask48 & 0xFFFF)),
        )
        assert suite_size_for_type(plane, t) == (1 << free) * 4
    print("[PASS] criterion 8: suite sizes 4 / 16 / 2^(k-k')*|H| exact")


def test_criterion_9_performance_trend():
    d, cfg, origin, _ = chain_plane(75)
    hdr = header_from_fields(SCHEMA48, {"dstTCP": 80})
    sim = simulate(d, cfg, Probe("u", origin, hdr))
    assert not sim.loop_hit
    assert len(sim.log) == 148  # 74 switches, ingress + egress each

    # tick slope: exactly 2 per switch hop along the chain
    ingress_ticks = [o.t for o in sim.log if o.direction == "in"]
    assert ingress_ticks == [2 * k - 1 for k in range(1, 75)]

    start = time.perf_counter()
    tree = build_flow_tree(d, origin, sim.log)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"{elapsed:.3f} s"
    paths = extract_paths(tree)
    assert len(paths) == 1
    (path,) = paths
    assert len(path) == 75
    print(f"[PASS] criterion 9: length-75 chain analyzed in {elapsed * 1000:.1f} ms")
