"""Interface-crossing observations and their log format.

An observation records that a probe crossed one switch interface at one
timestamp.  Monitors that can tell receive from transmit may tag each
record with a direction ("in" or "out"); the tag is optional and absent
records are treated as either.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .topology import DataPlane

INGRESS = "in"
EGRESS = "out"


class LogFormatError(ValueError):
    """Malformed or topology-inconsistent observation log."""


@dataclass(frozen=True)
class Observation:
    node: str
    iface: int
    t: int
    uid: str = ""
    direction: Optional[str] = None  # "in", "out", or None when unknown

    def sort_key(self) -> Tuple[int, str, int]:
        return (self.t, self.node, self.iface)


@dataclass(frozen=True)
class ObservationLog:
    """Observations sorted ascending by (t, node, iface)."""

    entries: Tuple[Observation, ...]

    @staticmethod
    def from_iterable(obs: Iterable[Observation]) -> "ObservationLog":
        return ObservationLog(tuple(sorted(obs, key=Observation.sort_key)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def for_uid(self, uid: str) -> "ObservationLog":
        return ObservationLog(tuple(o for o in self.entries if o.uid == uid))


def group_by_uid(log: ObservationLog) -> Dict[str, ObservationLog]:
    """Partition a log by probe UID, each part keeping sorted order."""
    parts: Dict[str, List[Observation]] = {}
    for o in log:
        parts.setdefault(o.uid, []).append(o)
    return {uid: ObservationLog(tuple(obs)) for uid, obs in parts.items()}


def parse_log(text: str, d: Optional[DataPlane] = None) -> ObservationLog:
    """Parse line-delimited JSON records {uid, node, iface, t[, direction]}.

    When a data-plane is given, every (node, iface) must exist on it and
    the node must be a switch.
    """
    entries: List[Observation] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            obs = Observation(
                node=str(rec["node"]),
                iface=int(rec["iface"]),
                t=int(rec["t"]),
                uid=str(rec.get("uid", "")),
                direction=rec.get("direction"),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise LogFormatError(f"line {lineno}: {exc}") from None
        if obs.direction not in (None, INGRESS, EGRESS):
            raise LogFormatError(f"line {lineno}: bad direction {obs.direction!r}")
        if d is not None:
            if obs.node not in d.switches:
                raise LogFormatError(f"line {lineno}: {obs.node!r} is not a switch")
            if obs.iface not in d.ports(obs.node):
                raise LogFormatError(
                    f"line {lineno}: no interface ({obs.node}, {obs.iface})"
                )
        entries.append(obs)
    return ObservationLog.from_iterable(entries)


def serialize_log(log: ObservationLog) -> str:
    lines = []
    for o in log:
        rec = {"uid": o.uid, "node": o.node, "iface": o.iface, "t": o.t}
        if o.direction is not None:
            rec["direction"] = o.direction
        lines.append(json.dumps(rec))
    return "\n".join(lines) + ("\n" if lines else "")
