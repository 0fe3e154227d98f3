"""Per-switch flow rules and the deterministic forwarding decision.

A rule matches on an optional ingress port plus a traffic type over the
header bits.  The highest-priority matching rule wins; ties go to the
rule installed first.  Unmatched packets are dropped.  A selected output
set never includes the ingress port (no hairpin); if that removal empties
the set the packet is dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from .headers import HeaderSchema, HeaderValue, TrafficType, indicator_eval, match_all, parse_filter, filter_to_text
from .topology import DataPlane

# lookup outcome: None means Drop, otherwise the (non-empty) output ports
Outcome = Optional[FrozenSet[int]]
DROP: Outcome = None


class RuleError(ValueError):
    """Rule references a port its switch does not have."""


@dataclass(frozen=True)
class Match:
    header: TrafficType
    in_port: Optional[int] = None

    def accepts(self, in_port: int, h: HeaderValue) -> bool:
        if self.in_port is not None and self.in_port != in_port:
            return False
        return indicator_eval(self.header, h)


@dataclass(frozen=True)
class FlowRule:
    priority: int
    match: Match
    out_ports: Optional[FrozenSet[int]]  # None = Drop

    def __post_init__(self) -> None:
        if self.priority < 0:
            raise RuleError("priority must be non-negative")
        if self.out_ports is not None and not self.out_ports:
            raise RuleError("Output action needs a non-empty port set; use Drop")


@dataclass(frozen=True)
class RuleTable:
    switch: str
    rules: Tuple[FlowRule, ...] = ()


def install(d: DataPlane, t: RuleTable, r: FlowRule) -> RuleTable:
    """Append a rule, keeping installation order.  Port references are
    checked against the switch here; hairpin legality is a lookup-time
    concern."""
    ports = d.ports(t.switch)
    if r.match.in_port is not None and r.match.in_port not in ports:
        raise RuleError(f"{t.switch} has no port {r.match.in_port}")
    if r.out_ports is not None:
        bad = [p for p in r.out_ports if p not in ports]
        if bad:
            raise RuleError(f"{t.switch} has no port(s) {sorted(bad)}")
    return RuleTable(t.switch, t.rules + (r,))


def lookup(d: DataPlane, t: RuleTable, in_port: int, h: HeaderValue) -> Outcome:
    """Forwarding decision for one packet arrival.

    Highest priority wins, earliest installation breaks ties, no match
    means Drop.  The ingress port is filtered from the output set.
    """
    if in_port not in d.ports(t.switch):
        raise RuleError(f"{t.switch} has no port {in_port}")
    chosen: Optional[FlowRule] = None
    for rule in t.rules:  # installation order; strict > keeps the first of a tie
        if rule.match.accepts(in_port, h):
            if chosen is None or rule.priority > chosen.priority:
                chosen = rule
    if chosen is None or chosen.out_ports is None:
        return DROP
    out = chosen.out_ports - {in_port}
    return frozenset(out) if out else DROP


@dataclass(frozen=True)
class DataPlaneConfig:
    """Frozen rule tables for every switch.

    forward_once marks configurations (the flood application) where a
    switch forwards only the first copy of a given probe it receives;
    later copies are still observed at ingress but not re-forwarded.
    """

    tables: Mapping[str, RuleTable]
    forward_once: bool = False

    def table(self, switch: str) -> RuleTable:
        return self.tables.get(switch, RuleTable(switch))


def empty_config(d: DataPlane) -> DataPlaneConfig:
    return DataPlaneConfig({s: RuleTable(s) for s in d.switches})


def flood_config(d: DataPlane, schema: HeaderSchema) -> DataPlaneConfig:
    """Reactive-forwarding behaviour: every switch sends any packet out of
    all its ports except the ingress one, but forwards each distinct
    probe only once (re-received copies are logged, not re-flooded)."""
    tables = {}
    for s in d.switches:
        rule = FlowRule(
            priority=0,
            match=Match(match_all(schema)),
            out_ports=frozenset(d.ports(s)),
        )
        tables[s] = RuleTable(s, (rule,))
    return DataPlaneConfig(tables, forward_once=True)


# -- rules file ------------------------------------------------------------
#
# JSON shape:
# {"switches": {"s1": [{"priority": 10, "in_port": 1, "match": "dstTCP=80",
#                       "action": [2]}, ...]},
#  "forward_once": false}
# action is a port list, or "drop".


def parse_rules(d: DataPlane, schema: HeaderSchema, text: str) -> DataPlaneConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleError(f"syntax error at line {exc.lineno}: {exc.msg}")
    if not isinstance(doc, dict) or "switches" not in doc:
        raise RuleError("rules document must be an object with a 'switches' section")
    tables = {s: RuleTable(s) for s in d.switches}
    for sw, recs in doc["switches"].items():
        if sw not in d.switches:
            raise RuleError(f"unknown switch {sw!r}")
        table = tables[sw]
        for rec in recs:
            action = rec.get("action", "drop")
            if action == "drop":
                out = None
            else:
                out = frozenset(int(p) for p in action)
            rule = FlowRule(
                priority=int(rec.get("priority", 0)),
                match=Match(
                    header=parse_filter(schema, rec.get("match", "")),
                    in_port=rec.get("in_port"),
                ),
                out_ports=out,
            )
            table = install(d, table, rule)
        tables[sw] = table
    return DataPlaneConfig(tables, forward_once=bool(doc.get("forward_once", False)))


def serialize_rules(cfg: DataPlaneConfig) -> str:
    doc = {"switches": {}, "forward_once": cfg.forward_once}
    for sw in sorted(cfg.tables):
        recs = []
        for rule in cfg.tables[sw].rules:
            rec = {
                "priority": rule.priority,
                "match": filter_to_text(rule.match.header),
                "action": "drop" if rule.out_ports is None else sorted(rule.out_ports),
            }
            if rule.match.in_port is not None:
                rec["in_port"] = rule.match.in_port
            recs.append(rec)
        doc["switches"][sw] = recs
    return json.dumps(doc, indent=2) + "\n"
