"""Command-line front end.

Exit codes: 0 success, 1 analysis verdicts present (loop or
disconnected path), 2 malformed input.
"""

from __future__ import annotations

import json
import sys

import click

from . import analyzer
from .forwarding import RuleError, parse_rules
from .headers import (
    DEFAULT_ENUM_LIMIT,
    DEFAULT_SCHEMA,
    EnumerationLimitError,
    FilterError,
    enumerate_headers,
    parse_filter,
)
from .observations import LogFormatError, parse_log, serialize_log
from .service import DiscoveryRequest, RequestError, discover, new_uid
from .simulate import Probe, simulate
from .testgen import bounds as compute_bounds
from .testgen import serialize_suite, stream_suite_for_type, suite_size_for_type
from .topology import TopologyError, parse_topology, validate


def _load_plane(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_topology(fh.read())
    except OSError as exc:
        raise click.ClickException(str(exc))
    except TopologyError as exc:
        click.echo(f"topology error: {exc}", err=True)
        sys.exit(2)


@click.group()
@click.option(
    "--limit",
    type=int,
    default=DEFAULT_ENUM_LIMIT,
    envvar="DATAPATHS_ENUM_LIMIT",
    show_default=True,
    help="Free-bit limit for uncapped header enumeration.",
)
@click.pass_context
def main(ctx: click.Context, limit: int) -> None:
    """Discover the data-paths a probe packet actually takes."""
    ctx.ensure_object(dict)
    ctx.obj["limit"] = limit


@main.command("validate")
@click.argument("topology", type=click.Path(exists=True))
def validate_cmd(topology: str) -> None:
    """Check a topology file against the structural rules."""
    try:
        with open(topology, "r", encoding="utf-8") as fh:
            text = fh.read()
        plane = parse_topology(text)
    except TopologyError as exc:
        click.echo(f"invalid: {exc}")
        sys.exit(2)
    report = validate(plane)
    for w in report.warnings:
        click.echo(f"warning: {w}")
    click.echo(f"ok: {len(plane.hosts)} hosts, {len(plane.switches)} switches, "
               f"{len(plane.links)} links")


@main.command("bounds")
@click.argument("topology", type=click.Path(exists=True))
def bounds_cmd(topology: str) -> None:
    """Worst-case path count and length for a single probe."""
    plane = _load_plane(topology)
    count, length = compute_bounds(plane)
    click.echo(f"max paths:  {count}")
    click.echo(f"max length: {length}")


@main.command("suite")
@click.argument("topology", type=click.Path(exists=True))
@click.argument("filter_text", metavar="FILTER")
@click.option("--cap", type=int, default=None, help="Stop after this many cases.")
@click.pass_context
def suite_cmd(ctx: click.Context, topology: str, filter_text: str, cap) -> None:
    """Emit the probe suite for a traffic filter, one case per line."""
    plane = _load_plane(topology)
    try:
        traffic = parse_filter(DEFAULT_SCHEMA, filter_text)
        click.echo(f"# exact size: {suite_size_for_type(plane, traffic)}", err=True)
        cases = stream_suite_for_type(plane, traffic, cap=cap, limit=ctx.obj["limit"])
        click.echo(serialize_suite(cases), nl=False)
    except (FilterError, EnumerationLimitError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@main.command("simulate")
@click.argument("topology", type=click.Path(exists=True))
@click.argument("rules", type=click.Path(exists=True))
@click.option("--from", "origin", required=True, help="Origin host.")
@click.option("--header", "filter_text", required=True,
              help="Traffic filter; the lexicographically first matching header is sent.")
def simulate_cmd(topology: str, rules: str, origin: str, filter_text: str) -> None:
    """Replay one probe and print its observation log."""
    plane = _load_plane(topology)
    try:
        with open(rules, "r", encoding="utf-8") as fh:
            cfg = parse_rules(plane, DEFAULT_SCHEMA, fh.read())
        traffic = parse_filter(DEFAULT_SCHEMA, filter_text)
        header = next(enumerate_headers(traffic, cap=1))
        if origin not in plane.hosts:
            raise RequestError(f"unknown host {origin!r}")
    except (RuleError, FilterError, RequestError, StopIteration) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    result = simulate(plane, cfg, Probe(new_uid(), origin, header))
    click.echo(serialize_log(result.log), nl=False)
    if result.loop_hit:
        click.echo("# loop: traversal cut off at the hop budget", err=True)
        sys.exit(1)


@main.command("discover")
@click.argument("topology", type=click.Path(exists=True))
@click.option("--rules", "rules_path", type=click.Path(exists=True), default=None)
@click.option("--log", "log_path", type=click.Path(exists=True), default=None)
@click.option("--from", "sources", multiple=True, help="Origin host (repeatable).")
@click.option("--header", "filter_text", required=True, help="Traffic filter.")
@click.option("--cap", type=int, default=None, help="Stop after this many cases.")
@click.pass_context
def discover_cmd(ctx, topology, rules_path, log_path, sources, filter_text, cap) -> None:
    """Run discovery and render one flow tree per probe."""
    if (rules_path is None) == (log_path is None):
        click.echo("error: exactly one of --rules / --log is required", err=True)
        sys.exit(2)
    plane = _load_plane(topology)
    cfg = log = None
    try:
        if rules_path is not None:
            with open(rules_path, "r", encoding="utf-8") as fh:
                cfg = parse_rules(plane, DEFAULT_SCHEMA, fh.read())
        else:
            with open(log_path, "r", encoding="utf-8") as fh:
                log = parse_log(fh.read(), plane)
        req = DiscoveryRequest(
            sources=tuple(sources),
            filter=filter_text,
            backend="simulate" if cfg is not None else "log",
            cap=cap,
        )
        result = discover(plane, req, cfg=cfg, log=log, limit=ctx.obj["limit"])
    except (RuleError, LogFormatError, FilterError, EnumerationLimitError,
            RequestError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    bad = 0
    for case in result.cases:
        click.echo(f"== probe {case.uid} from {case.host}: {case.status}")
        if case.tree is not None:
            click.echo(analyzer.render_tree(analyzer.tree_from_dict(case.tree)), nl=False)
        if case.status == "loop":
            click.echo(f"   repeated edge: {case.error_edge[0]}->{case.error_edge[1]}")
        if case.status == "disconnected":
            click.echo(f"   stranded observation: {case.error_observation}")
        if case.status != "ok":
            bad += 1
        for p in case.paths:
            click.echo("   path: " + " ".join(f"({a},{b})" for a, b in p))
    sys.exit(1 if bad else 0)


@main.command("render")
@click.argument("flowtree", type=click.Path(exists=True))
def render_cmd(flowtree: str) -> None:
    """Pretty-print an exported flow tree file."""
    try:
        with open(flowtree, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        tree = analyzer.tree_from_dict(doc if "root" in doc else {"root": doc})
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(analyzer.render_tree(tree), nl=False)


@main.command("serve")
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              envvar="DATAPATHS_LISTEN", help="host:port to bind.")
@click.option("--history", type=int, default=100, show_default=True,
              envvar="DATAPATHS_HISTORY", help="Probe history capacity.")
@click.pass_context
def serve_cmd(ctx, listen: str, history: int) -> None:
    """Run the HTTP discovery service."""
    import uvicorn

    from .service import create_app

    host, _, port = listen.partition(":")
    app = create_app(enum_limit=ctx.obj["limit"], history_capacity=history)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


if __name__ == "__main__":
    main()
