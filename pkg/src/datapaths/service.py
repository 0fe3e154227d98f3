"""Discovery orchestration: suites in, per-probe flow trees out.

`discover` drives the whole pipeline for one request: build the suite,
assign a UID per case, obtain each case's observation set (from the
simulator or from an ingested log), run the tree reconstruction, and
collect trees, paths, verdicts and timing.  `create_app` wraps the same
pipeline in a small HTTP API for the web client.
"""

from __future__ import annotations

import threading
import time
import uuid

from starlette.requests import Request
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import analyzer
from .forwarding import DataPlaneConfig
from .headers import (
    DEFAULT_ENUM_LIMIT,
    DEFAULT_SCHEMA,
    EnumerationLimitError,
    FilterError,
    HeaderSchema,
    HeaderValue,
    enumerate_headers,
    free_bit_count,
    parse_filter,
)
from .observations import ObservationLog, group_by_uid, parse_log, serialize_log
from .simulate import Probe, simulate
from .topology import DataPlane, TopologyError, parse_topology, serialize_topology, validate


class RequestError(ValueError):
    """Malformed or unsatisfiable discovery request."""


@dataclass(frozen=True)
class DiscoveryRequest:
    sources: Tuple[str, ...] = ()  # empty = every host
    filter: str = ""
    backend: str = "simulate"  # or "log"
    uids: Optional[Tuple[str, ...]] = None  # log backend: restrict to these
    cap: Optional[int] = None

    def __post_init__(self) -> None:
        if self.backend not in ("simulate", "log"):
            raise RequestError(f"unknown backend {self.backend!r}")


@dataclass
class CaseResult:
    uid: str
    host: str
    status: str  # ok | loop | disconnected | no-observations
    header_fields: Optional[Dict[str, int]] = None
    tree: Optional[dict] = None  # export shape, partial on errors
    paths: List[list] = field(default_factory=list)
    error_edge: Optional[Tuple[str, str]] = None
    error_observation: Optional[dict] = None
    loop_hit: bool = False
    observation_span: int = 0  # last tick minus first tick
    analysis_seconds: float = 0.0


@dataclass
class DiscoveryResult:
    request: DiscoveryRequest
    cases: List[CaseResult]

    def to_dict(self) -> dict:
        return {
            "request": {
                "sources": list(self.request.sources),
                "filter": self.request.filter,
                "backend": self.request.backend,
            },
            "cases": [
                {
                    "uid": c.uid,
                    "host": c.host,
                    "status": c.status,
                    "header": c.header_fields,
                    "tree": c.tree,
                    "paths": [[list(edge) for edge in p] for p in c.paths],
                    "error_edge": list(c.error_edge) if c.error_edge else None,
                    "error_observation": c.error_observation,
                    "loop_hit": c.loop_hit,
                    "observation_span": c.observation_span,
                    "analysis_seconds": c.analysis_seconds,
                }
                for c in self.cases
            ],
        }


def new_uid() -> str:
    return uuid.uuid4().hex  # 128 random bits, opaque


def _analyze(d: DataPlane, host: str, obs: ObservationLog, result: CaseResult) -> None:
    if len(obs) == 0:
        result.status = "no-observations"
        return
    ticks = [o.t for o in obs]
    result.observation_span = max(ticks) - min(ticks)
    start = time.perf_counter()
    try:
        tree = analyzer.build_flow_tree(d, host, obs)
    except analyzer.LoopError as exc:
        result.status = "loop"
        result.error_edge = exc.edge
        result.tree = analyzer.tree_to_dict(exc.partial)
        return
    except analyzer.DisconnectedError as exc:
        result.status = "disconnected"
        o = exc.observation
        result.error_observation = {"node": o.node, "iface": o.iface, "t": o.t}
        result.tree = analyzer.tree_to_dict(exc.partial)
        return
    finally:
        result.analysis_seconds = time.perf_counter() - start
    result.status = "ok"
    result.tree = analyzer.tree_to_dict(tree)
    result.paths = sorted(analyzer.extract_paths(tree))


def discover(
    d: DataPlane,
    req: DiscoveryRequest,
    cfg: Optional[DataPlaneConfig] = None,
    log: Optional[ObservationLog] = None,
    schema: HeaderSchema = DEFAULT_SCHEMA,
    limit: int = DEFAULT_ENUM_LIMIT,
) -> DiscoveryResult:
    sources = req.sources or tuple(sorted(d.hosts))
    unknown = [h for h in sources if h not in d.hosts]
    if unknown:
        raise RequestError(f"unknown host(s) {unknown}")
    traffic = parse_filter(schema, req.filter)

    cases: List[CaseResult] = []
    if req.backend == "simulate":
        if cfg is None:
            raise RequestError("simulate backend needs a rule configuration")
        produced = 0
        for host in sorted(sources):
            remaining = None if req.cap is None else req.cap - produced
            if remaining is not None and remaining <= 0:
                break
            for header in enumerate_headers(traffic, cap=remaining, limit=limit):
                uid = new_uid()
                result = CaseResult(
                    uid=uid,
                    host=host,
                    status="pending",
                    header_fields=header.fields_dict(),
                )
                sim = simulate(d, cfg, Probe(uid, host, header))
                result.loop_hit = sim.loop_hit
                _analyze(d, host, sim.log, result)
                cases.append(result)
                produced += 1
    else:
        if log is None:
            raise RequestError("log backend needs an ingested observation log")
        if len(sources) != 1:
            raise RequestError("log backend needs exactly one source host")
        host = sources[0]
        groups = group_by_uid(log)
        uids = req.uids if req.uids is not None else tuple(sorted(groups))
        for uid in uids:
            result = CaseResult(uid=uid, host=host, status="pending")
            _analyze(d, host, groups.get(uid, ObservationLog(())), result)
            cases.append(result)
    return DiscoveryResult(req, cases)


def ingest_log(text: str, d: DataPlane) -> ObservationLog:
    """Parse and topology-check an externally captured observation log."""
    return parse_log(text, d)


# -- HTTP API --------------------------------------------------------------


@dataclass
class ServiceState:
    plane: Optional[DataPlane] = None
    config: Optional[DataPlaneConfig] = None
    schema: HeaderSchema = DEFAULT_SCHEMA
    enum_limit: int = DEFAULT_ENUM_LIMIT
    history_capacity: int = 100
    history: "OrderedDict[str, dict]" = field(default_factory=OrderedDict)
    history_lock: threading.Lock = field(default_factory=threading.Lock)

    def remember(self, request_body: dict, result: DiscoveryResult) -> None:
        with self.history_lock:
            for case in result.to_dict()["cases"]:
                entry = {"request": request_body, "case": case}
                self.history[case["uid"]] = entry
                while len(self.history) > self.history_capacity:
                    self.history.popitem(last=False)


def create_app(
    state: Optional[ServiceState] = None,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
    history_capacity: int = 100,
):
    from fastapi import FastAPI, HTTPException

    if state is None:
        state = ServiceState(enum_limit=enum_limit, history_capacity=history_capacity)
    app = FastAPI(title="data-path discovery service")
    app.state.service = state

    @app.get("/topology")
    def get_topology():
        if state.plane is None:
            raise HTTPException(status_code=404, detail="no topology loaded")
        return state.plane.to_dict()

    @app.put("/topology")
    async def put_topology(request: Request):
        text = (await request.body()).decode("utf-8")
        try:
            plane = parse_topology(text)
        except TopologyError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        report = validate(plane)
        state.plane = plane
        state.config = None  # rules reference ports of the old graph
        return {"ok": True, "warnings": list(report.warnings)}

    @app.put("/rules")
    async def put_rules(request: Request):
        from .forwarding import RuleError, parse_rules

        if state.plane is None:
            raise HTTPException(status_code=400, detail="load a topology first")
        text = (await request.body()).decode("utf-8")
        try:
            state.config = parse_rules(state.plane, state.schema, text)
        except (RuleError, FilterError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"ok": True}

    @app.post("/discover")
    async def post_discover(request: Request):
        if state.plane is None:
            raise HTTPException(status_code=400, detail="load a topology first")
        body = await request.json()
        filter_text = body.get("filter", "")
        try:
            traffic = parse_filter(state.schema, filter_text)
        except FilterError as exc:
            raise HTTPException(status_code=400, detail=f"filter: {exc}")
        if body.get("dry_run"):
            return {
                "ok": True,
                "free_bits": free_bit_count(traffic),
            }
        try:
            req = DiscoveryRequest(
                sources=tuple(body.get("sources", ())),
                filter=filter_text,
                backend=body.get("backend", "simulate"),
                uids=tuple(body["uids"]) if "uids" in body else None,
                cap=body.get("cap"),
            )
        except RequestError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        log = None
        if req.backend == "log":
            try:
                log = ingest_log(body.get("log", ""), state.plane)
            except Exception as exc:
                raise HTTPException(status_code=400, detail=f"log: {exc}")
        try:
            result = discover(
                state.plane,
                req,
                cfg=state.config,
                log=log,
                schema=state.schema,
                limit=state.enum_limit,
            )
        except (RequestError, FilterError, EnumerationLimitError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        doc = result.to_dict()
        state.remember(doc["request"], result)
        return doc

    @app.get("/probes")
    def get_probes():
        with state.history_lock:
            return {"probes": list(state.history.values())}

    @app.get("/probes/{uid}")
    def get_probe(uid: str):
        with state.history_lock:
            entry = state.history.get(uid)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown probe {uid}")
        return entry

    return app
