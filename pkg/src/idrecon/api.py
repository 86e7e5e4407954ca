"""HTTP/JSON façade over the framework for the web UI.

One service per project per process. Mutations serialize through the graph's
single writer; job execution stays concurrent via the module engine. Domain
errors map 1:1 to HTTP statuses with machine-readable codes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from . import errors
from .builtins import gather_wordlist_tokens, register_builtin_modules
from .engine import Job, ModuleEngine
from .graph import EntityKind, EntityNode, Provenance
from .siteprobe import RECORD, REPLAY, Transport
from .store import Project
from .wordlist import WordlistConfig, generate_wordlist, write_wordlist

STATUS_BY_ERROR = {
    errors.KindMismatch: 409,
    errors.DuplicateName: 409,
    errors.PathOccupied: 409,
    errors.UnknownNode: 404,
    errors.UnknownJob: 404,
    errors.UnknownModule: 404,
    errors.EmptyValue: 422,
    errors.InvalidPathValue: 422,
    errors.ParamInvalid: 422,
    errors.InvalidDomain: 422,
    errors.EmptyTokenSet: 422,
    errors.SchemaViolation: 422,
    errors.IoError: 500,
}

# only user-facing artifacts are downloadable
SERVABLE_PREFIXES = ("Files/", "wordlists/")


class NodeBody(BaseModel):
    kind: str
    value: str
    label: Optional[str] = None


class EdgeBody(BaseModel):
    from_id: str = Field(alias="from")
    to_id: str = Field(alias="to")
    label: str
    model_config = {"populate_by_name": True}


class TransportBody(BaseModel):
    mode: str = REPLAY
    fixture: Optional[str] = None


class JobBody(BaseModel):
    module: str
    node: str
    params: dict = Field(default_factory=dict)
    transport: Optional[TransportBody] = None


class WordlistBody(BaseModel):
    tokens: Optional[list[str]] = None
    from_node: Optional[str] = None
    config: dict = Field(default_factory=dict)


def _kind(value: str) -> EntityKind:
    try:
        return EntityKind(value)
    except ValueError:
        raise errors.ParamInvalid(f"unknown entity kind: {value!r}") from None


def node_doc(node: EntityNode) -> dict:
    return {
        "id": node.id,
        "kind": node.kind.value,
        "value": node.value,
        "label": node.display_label,
        "provenance": {
            "origin": node.provenance.origin,
            "module": node.provenance.module_name,
            "job": node.provenance.job_id,
            "source_category": (
                node.provenance.source_category.value if node.provenance.source_category else None
            ),
        },
        "created_at": node.created_at,
    }


def job_doc(job: Job) -> dict:
    return {
        "id": job.id,
        "module": job.module_name,
        "node": job.input_node,
        "params": job.params,
        "state": job.state.value,
        "error": job.error,
        "started_at": job.started_at,
        "finished_at": job.finished_at,
        "nodes": list(job.committed_node_ids),
        "edges": list(job.committed_edge_ids),
        "files": [relpath for relpath, _ in job.staged_files],
    }


class ApiService:
    def __init__(self, project: Project):
        self.project = project
        self.graph = project.load_graph()
        self.engine = ModuleEngine(self.graph, project)
        register_builtin_modules(self.engine)
        self.app = _build_app(self)

    def shutdown(self) -> None:
        """Graceful: waits for running jobs, so pending commits flush."""
        self.engine.shutdown(wait=True)

    def build_transport(self, body: Optional[TransportBody]) -> Optional[Transport]:
        if body is None:
            return None
        if body.mode == REPLAY:
            if body.fixture:
                path = self.project.resolve(body.fixture)
                if not path.is_file():
                    raise errors.IoError(f"replay fixture not found: {body.fixture}")
                return Transport.replay(path)
            return Transport.replay({"interactions": []})
        if body.mode == RECORD:
            if not body.fixture:
                raise errors.ParamInvalid("record transport requires a fixture path")
            return Transport.record(self.project.resolve(body.fixture))
        return Transport.live()


def create_service(project: Project) -> ApiService:
    return ApiService(project)


def create_app(project: Project) -> FastAPI:
    return create_service(project).app


def _build_app(service: ApiService) -> FastAPI:
    app = FastAPI(title="idrecon api", version="0.1.0")
    app.state.service = service
    graph = service.graph
    project = service.project
    engine = service.engine

    @app.exception_handler(errors.IdreconError)
    async def domain_error_handler(_request: Request, exc: errors.IdreconError):
        status = STATUS_BY_ERROR.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc)},
        )

    @app.get("/api/project")
    def get_project():
        meta = project.meta
        return {
            "name": meta.name,
            "created_at": meta.created_at,
            "schema_version": meta.schema_version,
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
        }

    @app.get("/api/graph")
    def get_graph():
        return graph.export_graph()

    @app.post("/api/nodes")
    def post_node(body: NodeBody, response: Response):
        with graph.lock:
            before = graph.node_count()
            nid = graph.upsert_node(
                _kind(body.kind), body.value, Provenance.seed(), body.label
            )
            created = graph.node_count() > before
            project.save_graph(graph)
        response.status_code = 201 if created else 200
        return {"node": node_doc(graph.node(nid)), "created": created}

    @app.post("/api/edges", status_code=201)
    def post_edge(body: EdgeBody):
        with graph.lock:
            eid = graph.add_edge(body.from_id, body.to_id, body.label)
            project.save_graph(graph)
        return {"id": eid}

    @app.get("/api/modules")
    def get_modules(input_kind: Optional[str] = None):
        kind = _kind(input_kind) if input_kind else None
        return {
            "modules": [
                {
                    "name": d.name,
                    "phase": d.phase.value,
                    "input_kinds": sorted(k.value for k in d.input_kinds),
                    "output_kinds": sorted(k.value for k in d.output_kinds),
                    "produces_files": d.produces_files,
                    "network_access": d.network_access,
                    "params": [
                        {"name": p.name, "type": p.type, "default": p.default}
                        for p in d.params
                    ],
                }
                for d in engine.list_modules(input_kind=kind)
            ]
        }

    @app.post("/api/jobs", status_code=202)
    def post_job(body: JobBody):
        transport = service.build_transport(body.transport)
        job_id = engine.run_module(body.module, body.node, body.params, transport)
        return {"job": job_id, "state": engine.job_status(job_id).state.value}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return job_doc(engine.job_status(job_id))

    @app.get("/api/jobs/{job_id}/events")
    def get_job_events(job_id: str):
        engine.job_status(job_id)  # 404 before the stream starts

        def stream():
            for event in engine.job_events(job_id):
                yield f"data: {json.dumps(event)}\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/api/files/{relpath:path}")
    def get_file(relpath: str):
        if not relpath.startswith(SERVABLE_PREFIXES):
            raise errors.UnknownNode(f"not a servable path: {relpath}")
        path = project.resolve(relpath)
        if not path.is_file():
            raise errors.UnknownNode(f"no such file: {relpath}")
        # wordlists download as plain text; raw artifacts as binary
        media_type = "text/plain; charset=utf-8" if relpath.startswith("wordlists/") else "application/octet-stream"
        return FileResponse(path, media_type=media_type, filename=Path(relpath).name)

    @app.post("/api/wordlists", status_code=201)
    def post_wordlist(body: WordlistBody):
        if body.tokens is not None:
            from .text import clean_tokens

            tokens = clean_tokens(body.tokens)
        elif body.from_node:
            tokens = gather_wordlist_tokens(graph, body.from_node)
        else:
            raise errors.ParamInvalid("provide either tokens or from_node")
        config = _config_from_json(body.config)
        wl = generate_wordlist(tokens, config)
        relpath = f"wordlists/wl-{wl.config_fingerprint[:16]}.txt"
        write_wordlist(wl, project.resolve(relpath))
        return {
            "count": len(wl.candidates),
            "download_url": f"/api/files/{relpath}",
            "fingerprint": wl.config_fingerprint,
        }

    return app


def _config_from_json(raw: dict) -> WordlistConfig:
    try:
        return WordlistConfig(
            case_variants=tuple(raw.get("case", ("lower", "capitalized", "upper"))),
            leet=bool(raw.get("leet", False)),
            suffixes=tuple(raw.get("suffixes", ("", "123", "!"))),
            year_from=raw.get("year_from"),
            year_to=raw.get("year_to"),
            combine_depth=int(raw.get("depth", 1)),
            max_candidates=int(raw.get("max", 100000)),
        )
    except (TypeError, ValueError) as exc:
        raise errors.ParamInvalid(f"bad wordlist config: {exc}") from exc
