"""Scriptable command-line interface.

Every workflow the web UI offers is reachable here: seed nodes, list and run
modules, probe usernames, export the graph, generate wordlists, render a
report, or serve the HTTP API. Exit codes: 0 ok, 1 usage, 2 domain error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import errors
from .builtins import bundled_site_pack, gather_wordlist_tokens, register_builtin_modules
from .engine import JobState, ModuleEngine
from .graph import EntityGraph, EntityKind, Provenance
from .siteprobe import LIVE, RECORD, REPLAY, Transport, load_site_list, probe_username
from .store import Project
from .text import clean_tokens
from .wordlist import WordlistConfig, generate_wordlist, write_wordlist

PROJECT_ENV = "IDRECON_PROJECT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we want exit 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="idrecon", description=__doc__)
    parser.add_argument("--project", default=os.environ.get(PROJECT_ENV),
                        help=f"project directory (default: ${PROJECT_ENV})")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("init", help="create a new project")
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("add", help="seed an entity node")
    p.add_argument("--kind", required=True, choices=[k.value for k in EntityKind])
    p.add_argument("--value", required=True)
    p.add_argument("--label")
    p.set_defaults(func=cmd_add)

    p = sub.add_parser("modules", help="list registered modules")
    p.add_argument("--input-kind", choices=[k.value for k in EntityKind])
    p.set_defaults(func=cmd_modules)

    p = sub.add_parser("run", help="run a module on a node")
    p.add_argument("--module", required=True)
    p.add_argument("--node", required=True)
    p.add_argument("--param", action="append", default=[], metavar="K=V")
    p.add_argument("--transport", choices=[LIVE, REPLAY, RECORD], default=REPLAY)
    p.add_argument("--fixture", help="transport fixture path (replay/record)")
    p.add_argument("--async", dest="async_", action="store_true",
                   help="print the job id immediately instead of waiting")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("status", help="show a finished job")
    p.add_argument("--job", required=True)
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("graph-export", help="write the graph document")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_graph_export)

    p = sub.add_parser("probe", help="check a username across sites")
    p.add_argument("--username", required=True)
    p.add_argument("--sites", help="site pack JSON (default: bundled test pack)")
    p.add_argument("--transport", choices=[LIVE, REPLAY, RECORD], default=REPLAY)
    p.add_argument("--fixture")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("wordlist", help="generate password candidates")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--from-node", help="pull tokens from this node and its out-neighbors")
    src.add_argument("--from-file", help="read raw tokens, one per line")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--case", default="lower,capitalized,upper",
                   help="comma-separated subset of lower,capitalized,upper")
    p.add_argument("--leet", action="store_true")
    p.add_argument("--suffixes", default=",123,!",
                   help="comma-separated suffixes; empty element = bare token")
    p.add_argument("--depth", type=int, default=1, choices=[1, 2])
    p.add_argument("--max", type=int, default=100000)
    p.set_defaults(func=cmd_wordlist)

    p = sub.add_parser("report", help="render figures and CSV exports")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the HTTP API for the web UI")
    p.add_argument("--addr", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8714)
    p.set_defaults(func=cmd_serve)

    return parser


# -- helpers -------------------------------------------------------------


def _require_project(args) -> Project:
    if not args.project:
        raise UsageError(f"--project (or ${PROJECT_ENV}) is required for this command")
    return Project.open(args.project)


def _engine_for(project: Project) -> tuple[EntityGraph, ModuleEngine]:
    graph = project.load_graph()
    engine = ModuleEngine(graph, project)
    register_builtin_modules(engine)
    return graph, engine


def _build_transport(mode: str, fixture: str | None) -> Transport:
    if mode == REPLAY:
        if fixture:
            path = Path(fixture)
            if not path.is_file():
                raise errors.IoError(f"replay fixture not found: {fixture}")
            return Transport.replay(path)
        return Transport.replay({"interactions": []})
    if mode == RECORD:
        if not fixture:
            raise UsageError("--transport record requires --fixture")
        return Transport.record(fixture)
    return Transport.live()


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"--param needs K=V, got {pair!r}")
        key, value = pair.split("=", 1)
        params[key] = value
    return params


def _emit(args, payload: dict, human: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        for line in human:
            print(line)


# -- verbs ---------------------------------------------------------------


def cmd_init(args) -> int:
    if not args.project:
        raise UsageError(f"--project (or ${PROJECT_ENV}) is required")
    project = Project.init(args.project, args.name)
    _emit(args, {"project": str(project.root), "name": args.name},
          [f"initialized project {args.name!r} at {project.root}"])
    return 0


def cmd_add(args) -> int:
    project = _require_project(args)
    graph = project.load_graph()
    before = graph.node_count()
    nid = graph.upsert_node(EntityKind(args.kind), args.value, Provenance.seed(), args.label)
    created = graph.node_count() > before
    project.save_graph(graph)
    node = graph.node(nid)
    _emit(args, {"id": nid, "kind": node.kind.value, "value": node.value, "created": created},
          [f"{nid}  {node.kind.value}  {node.value}" + ("" if created else "  (existing)")])
    return 0


def cmd_modules(args) -> int:
    project = _require_project(args)
    _, engine = _engine_for(project)
    kind = EntityKind(args.input_kind) if args.input_kind else None
    rows = []
    for d in engine.list_modules(input_kind=kind):
        rows.append({
            "name": d.name,
            "phase": d.phase.value,
            "input_kinds": sorted(k.value for k in d.input_kinds),
            "output_kinds": sorted(k.value for k in d.output_kinds),
            "params": [{"name": p.name, "type": p.type, "default": p.default} for p in d.params],
        })
    human = [
        f"{r['name']:22} {r['phase']:11} {','.join(r['input_kinds']):24} -> {','.join(r['output_kinds'])}"
        for r in rows
    ]
    _emit(args, {"modules": rows}, human)
    engine.shutdown()
    return 0


def cmd_run(args) -> int:
    project = _require_project(args)
    graph, engine = _engine_for(project)
    transport = _build_transport(args.transport, args.fixture)
    try:
        job_id = engine.run_module(args.module, args.node, _parse_params(args.param), transport)
        if args.async_:
            _emit(args, {"job": job_id, "state": "pending"}, [job_id])
            return 0
        job = engine.wait(job_id)
    finally:
        engine.shutdown()
    payload = {
        "job": job_id,
        "state": job.state.value,
        "nodes": job.committed_node_ids,
        "error": job.error,
    }
    if job.state == JobState.FAILED:
        _emit(args, payload, [f"{job_id} failed: {job.error}"])
        return 2
    _emit(args, payload,
          [f"{job_id} succeeded: {len(job.committed_node_ids)} nodes committed"])
    return 0


def cmd_status(args) -> int:
    project = _require_project(args)
    record = project.job_record(args.job)
    if record is None:
        raise errors.UnknownJob(f"no such job in the log: {args.job}")
    _emit(args, record,
          [f"{record['id']}  {record['module']}  {record['state']}  nodes={len(record['nodes'])}"])
    return 0


def cmd_graph_export(args) -> int:
    project = _require_project(args)
    data = project.load_graph().export_bytes()
    if args.out:
        Path(args.out).write_bytes(data)
        _emit(args, {"out": args.out, "bytes": len(data)}, [f"wrote {len(data)} bytes to {args.out}"])
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def cmd_probe(args) -> int:
    if args.sites:
        sites = load_site_list(Path(args.sites))
    else:
        sites = load_site_list(bundled_site_pack())
    transport = _build_transport(args.transport, args.fixture)
    results = probe_username(args.username, sites, transport)
    rows = [
        {"site": r.site, "verdict": r.verdict.value, "url": r.url, "status": r.status}
        for r in results
    ]
    human = [f"{r['site']:12} {r['verdict']:16} {r['url']}" for r in rows]
    _emit(args, {"username": args.username, "results": rows}, human)
    return 0


def cmd_wordlist(args) -> int:
    tokens: list[str]
    if args.from_file:
        raw = Path(args.from_file).read_text("utf-8").splitlines()
        tokens = clean_tokens(raw)
    else:
        project = _require_project(args)
        graph = project.load_graph()
        tokens = gather_wordlist_tokens(graph, args.from_node)
    config = WordlistConfig(
        case_variants=tuple(c for c in args.case.split(",") if c),
        leet=args.leet,
        suffixes=tuple(args.suffixes.split(",")),
        combine_depth=args.depth,
        max_candidates=args.max,
    )
    wl = generate_wordlist(tokens, config)
    if args.out:
        n = write_wordlist(wl, args.out)
        _emit(args, {"out": args.out, "count": len(wl.candidates), "bytes": n,
                     "fingerprint": wl.config_fingerprint},
              [f"wrote {len(wl.candidates)} candidates to {args.out}"])
    else:
        for candidate in wl.candidates:
            print(candidate)
    return 0


def cmd_report(args) -> int:
    from .report import generate_report  # heavy import (matplotlib), keep lazy

    project = _require_project(args)
    artifacts = generate_report(project, args.out_dir)
    _emit(args, {"artifacts": artifacts},
          [f"{name}: {path}" for name, path in sorted(artifacts.items())])
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_service

    project = _require_project(args)
    service = create_service(project)
    try:
        uvicorn.run(service.app, host=args.addr, port=args.port, log_level="warning")
    except OSError as exc:
        raise errors.IoError(f"cannot bind {args.addr}:{args.port}: {exc}") from exc
    finally:
        service.shutdown()
    return 0


def execute(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (errors.IoError, errors.PathOccupied, errors.SinkError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except errors.IdreconError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(execute())
