"""Probe suite construction and worst-case budget formulas.

A test case is (origin host, concrete header).  Suites over a traffic
type are streamed, since the uncapped size 2^(free bits) * |hosts| can
be astronomically larger than memory; the exact size is reported
separately as a big integer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

from .headers import (
    HeaderValue,
    TrafficType,
    enumerate_headers,
    free_bit_count,
    match_all,
    DEFAULT_ENUM_LIMIT,
)
from .topology import DataPlane


@dataclass(frozen=True)
class TestCase:
    host: str
    header: HeaderValue


@dataclass(frozen=True)
class TestSuite:
    cases: Tuple[TestCase, ...]  # duplicate-free, deterministic order

    def __len__(self) -> int:
        return len(self.cases)

    def __iter__(self) -> Iterator[TestCase]:
        return iter(self.cases)


def suite_for_header(d: DataPlane, hdr: HeaderValue) -> TestSuite:
    """One case per host, all with the same header; size |hosts|."""
    return TestSuite(tuple(TestCase(h, hdr) for h in sorted(d.hosts)))


def suite_size_for_type(d: DataPlane, t: TrafficType) -> int:
    """Exact uncapped size: 2^(free bits) * |hosts|."""
    return (1 << free_bit_count(t)) * len(d.hosts)


def stream_suite_for_type(
    d: DataPlane,
    t: TrafficType,
    cap: Optional[int] = None,
    limit: int = DEFAULT_ENUM_LIMIT,
) -> Iterator[TestCase]:
    """Hosts x matching headers, streamed; cap bounds the total yield."""
    produced = 0
    for h in sorted(d.hosts):
        remaining = None if cap is None else cap - produced
        if remaining is not None and remaining <= 0:
            return
        for hdr in enumerate_headers(t, cap=remaining, limit=limit):
            yield TestCase(h, hdr)
            produced += 1
            if cap is not None and produced >= cap:
                return


def suite_for_type(
    d: DataPlane,
    t: TrafficType,
    cap: Optional[int] = None,
    limit: int = DEFAULT_ENUM_LIMIT,
) -> TestSuite:
    """Materialized form of stream_suite_for_type; refuses oversized
    enumerations the same way enumerate_headers does."""
    return TestSuite(tuple(stream_suite_for_type(d, t, cap=cap, limit=limit)))


def suite_all_headers(
    d: DataPlane, t_schema, cap: Optional[int] = None, limit: int = DEFAULT_ENUM_LIMIT
) -> TestSuite:
    """Exhaustive suite over every possible header (size 2^k * |hosts|);
    gated behind the same free-bit limit, present for completeness."""
    return suite_for_type(d, match_all(t_schema), cap=cap, limit=limit)


def bounds(d: DataPlane) -> Tuple[int, int]:
    """Worst-case (path count, path length) for any single probe:
    ((|V|-1)^(|V|(|V|-1)), |V|(|V|-1)), exact integers."""
    n = len(d.nodes)
    length = n * (n - 1)
    return ((n - 1) ** length, length)


def serialize_suite(suite_iter) -> str:
    """Line-delimited {host, header} records."""
    lines = []
    for case in suite_iter:
        lines.append(json.dumps({"host": case.host, "header": case.header.fields_dict()}))
    return "\n".join(lines) + ("\n" if lines else "")
