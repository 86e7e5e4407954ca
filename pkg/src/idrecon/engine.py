"""Registry and executor for transform modules.

A module declares what it consumes and produces; the engine runs it as an
asynchronous job that stages nodes and files, then commits everything
atomically: staged nodes are upserted, edged from the input node, and files
land in Files/. A failed job leaves the graph and Files/ untouched.
"""

from __future__ import annotations

import subprocess
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Optional

from .errors import (
    DuplicateName,
    InvalidDescriptor,
    KindMismatch,
    ParamInvalid,
    UnknownJob,
    UnknownModule,
)
from .graph import EntityGraph, EntityKind, EntityNode, Provenance, SourceCategory
from .interpret import interpret_list_output
from .siteprobe import Transport
from .store import Project

PARAM_TYPES = ("text", "int", "flag")


class ModulePhase(str, Enum):
    COLLECTION = "collection"
    ANALYSIS = "analysis"
    EXTRACTION = "extraction"


class JobState(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCEEDED = "succeeded"
    FAILED = "failed"


NETWORK_NONE = "none"
NETWORK_TRANSPORT = "transport"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    type: str
    default: object

    def __post_init__(self):
        if self.type not in PARAM_TYPES:
            raise InvalidDescriptor(f"param {self.name!r}: unknown type {self.type!r}")


@dataclass(frozen=True)
class ModuleDescriptor:
    name: str
    phase: ModulePhase
    input_kinds: frozenset[EntityKind]
    output_kinds: frozenset[EntityKind]
    produces_files: bool = False
    network_access: str = NETWORK_NONE
    params: tuple[ParamSpec, ...] = ()

    def __post_init__(self):
        if not self.input_kinds:
            raise InvalidDescriptor(f"module {self.name!r}: input_kinds must be non-empty")
        if self.network_access not in (NETWORK_NONE, NETWORK_TRANSPORT):
            raise InvalidDescriptor(
                f"module {self.name!r}: bad network_access {self.network_access!r}"
            )
        names = [p.name for p in self.params]
        if len(names) != len(set(names)):
            raise InvalidDescriptor(f"module {self.name!r}: duplicate param names")


@dataclass(frozen=True)
class StagedNode:
    kind: EntityKind
    value: str
    label: str
    source_category: Optional[SourceCategory] = None


@dataclass
class Job:
    id: str
    module_name: str
    input_node: str
    params: dict
    state: JobState = JobState.PENDING
    staged_nodes: list[StagedNode] = field(default_factory=list)
    staged_files: list[tuple[str, bytes]] = field(default_factory=list)
    error: Optional[str] = None
    started_at: Optional[str] = None
    finished_at: Optional[str] = None
    committed_node_ids: list[str] = field(default_factory=list)
    committed_edge_ids: list[str] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


class ModuleContext:
    """What a module implementation gets to work with during a run."""

    def __init__(self, engine: "ModuleEngine", job: Job, node: EntityNode,
                 descriptor: ModuleDescriptor, transport: Optional[Transport]):
        self._engine = engine
        self._job = job
        self._descriptor = descriptor
        self.node = node
        self.params = job.params
        self.graph = engine.graph
        self.project = engine.project
        self.transport = transport
        self.adapters = engine.adapters

    def stage_node(
        self,
        kind: EntityKind,
        value: str,
        label: str,
        source_category: Optional[SourceCategory] = None,
    ) -> None:
        kind = EntityKind(kind)
        if kind not in self._descriptor.output_kinds:
            raise ValueError(
                f"module {self._descriptor.name!r} staged a {kind.value} node "
                "outside its declared output kinds"
            )
        self._job.staged_nodes.append(StagedNode(kind, value, label, source_category))

    def stage_file(self, suggested_name: str, data: bytes) -> str:
        """Reserve a collision-free name under Files/ now; bytes are written
        only when the job commits. Returns the project-relative path."""
        if not self._descriptor.produces_files:
            raise ValueError(
                f"module {self._descriptor.name!r} does not declare produces_files"
            )
        relpath = self.project.reserve_file_name(suggested_name)
        self._job.staged_files.append((relpath, data))
        return relpath

    def read_file(self, relpath: str) -> bytes:
        return self.project.resolve(relpath).read_bytes()


ModuleImpl = Callable[[ModuleContext], None]


class ModuleEngine:
    """Holds the registry, runs jobs, and serializes commits through the
    graph's single writer."""

    def __init__(
        self,
        graph: EntityGraph,
        project: Project,
        max_workers: int = 4,
        default_transport: Optional[Callable[[], Transport]] = None,
    ):
        self.graph = graph
        self.project = project
        self.adapters: dict[str, object] = {}
        self._registry: dict[str, tuple[ModuleDescriptor, ModuleImpl]] = {}
        self._jobs: dict[str, Job] = {}
        self._jobs_lock = threading.Lock()
        self._conditions: dict[str, threading.Condition] = {}
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        # default transport is replay-with-empty-fixture: safe, zero network
        self._default_transport = default_transport or (lambda: Transport.replay({"interactions": []}))

    # -- registry ---------------------------------------------------------

    def register_module(self, descriptor: ModuleDescriptor, implementation: ModuleImpl) -> str:
        if descriptor.name in self._registry:
            raise DuplicateName(f"module {descriptor.name!r} already registered")
        self._registry[descriptor.name] = (descriptor, implementation)
        return descriptor.name

    def register_adapter(self, name: str, adapter: object) -> None:
        self.adapters[name] = adapter

    def list_modules(
        self,
        input_kind: Optional[EntityKind] = None,
        phase: Optional[ModulePhase] = None,
    ) -> list[ModuleDescriptor]:
        out = []
        for name in sorted(self._registry):
            desc, _ = self._registry[name]
            if input_kind is not None and EntityKind(input_kind) not in desc.input_kinds:
                continue
            if phase is not None and desc.phase != ModulePhase(phase):
                continue
            out.append(desc)
        return out

    def descriptor(self, name: str) -> ModuleDescriptor:
        try:
            return self._registry[name][0]
        except KeyError:
            raise UnknownModule(f"no module named {name!r}") from None

    # -- job lifecycle -------------------------------------------------------

    def run_module(
        self,
        module_name: str,
        node_id: str,
        params: Optional[dict] = None,
        transport: Optional[Transport] = None,
    ) -> str:
        if module_name not in self._registry:
            raise UnknownModule(f"no module named {module_name!r}")
        descriptor, implementation = self._registry[module_name]
        node = self.graph.node(node_id)  # raises UnknownNode
        if node.kind not in descriptor.input_kinds:
            raise KindMismatch(
                f"module {module_name!r} consumes "
                f"{sorted(k.value for k in descriptor.input_kinds)}, "
                f"not {node.kind.value}"
            )
        bound = self._bind_params(descriptor, params or {})
        job = Job(id="j" + uuid.uuid4().hex[:12], module_name=module_name,
                  input_node=node_id, params=bound)
        with self._jobs_lock:
            self._jobs[job.id] = job
            self._conditions[job.id] = threading.Condition()
        if descriptor.network_access == NETWORK_TRANSPORT:
            job_transport = transport if transport is not None else self._default_transport()
        else:
            job_transport = None
        self._executor.submit(self._execute, job, descriptor, implementation, node, job_transport)
        return job.id

    def _bind_params(self, descriptor: ModuleDescriptor, params: dict) -> dict:
        specs = {p.name: p for p in descriptor.params}
        unknown = set(params) - set(specs)
        if unknown:
            raise ParamInvalid(f"unknown params: {sorted(unknown)}")
        bound = {}
        for name, spec in specs.items():
            if name not in params:
                bound[name] = spec.default
                continue
            value = params[name]
            if spec.type == "int":
                try:
                    bound[name] = int(value)
                except (TypeError, ValueError):
                    raise ParamInvalid(f"param {name!r} must be an int, got {value!r}") from None
            elif spec.type == "flag":
                if isinstance(value, bool):
                    bound[name] = value
                elif isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
                    bound[name] = value.lower() in ("true", "1")
                else:
                    raise ParamInvalid(f"param {name!r} must be a flag, got {value!r}")
            else:
                if not isinstance(value, str):
                    raise ParamInvalid(f"param {name!r} must be text, got {value!r}")
                bound[name] = value
        return bound

    def _execute(
        self,
        job: Job,
        descriptor: ModuleDescriptor,
        implementation: ModuleImpl,
        node: EntityNode,
        transport: Optional[Transport],
    ) -> None:
        self._transition(job, JobState.RUNNING)
        job.started_at = _now()
        ctx = ModuleContext(self, job, node, descriptor, transport)
        try:
            implementation(ctx)
            self._commit(job, descriptor, node)
        except Exception as exc:  # noqa: BLE001 — module code is arbitrary
            self._release_staged_files(job)
            job.error = f"{type(exc).__name__}: {exc}"
            self._finish(job, JobState.FAILED)
        else:
            self._finish(job, JobState.SUCCEEDED)

    def _finish(self, job: Job, state: JobState) -> None:
        # log before the terminal transition so anyone woken by wait()
        # already finds the job record on disk
        job.finished_at = _now()
        self._log(job, state)
        self._transition(job, state)

    def _commit(self, job: Job, descriptor: ModuleDescriptor, node: EntityNode) -> None:
        """Atomic: files + nodes + edges land together or not at all."""
        with self.graph.lock:
            snapshot = self.graph.snapshot_state()
            written: list[str] = []
            try:
                for relpath, data in job.staged_files:
                    self.project.write_reserved(relpath, data)
                    written.append(relpath)
                for staged in job.staged_nodes:
                    provenance = Provenance.module(
                        job.module_name, job.id, staged.source_category
                    )
                    nid = self.graph.upsert_node(staged.kind, staged.value, provenance)
                    eid = self.graph.add_edge(node.id, nid, staged.label, job.id)
                    job.committed_node_ids.append(nid)
                    job.committed_edge_ids.append(eid)
                self.project.save_graph(self.graph)
            except Exception:
                self.graph.restore_state(snapshot)
                for relpath in written:
                    self.project.remove_file(relpath)
                job.committed_node_ids.clear()
                job.committed_edge_ids.clear()
                raise

    def _release_staged_files(self, job: Job) -> None:
        for relpath, _ in job.staged_files:
            self.project.release_reservation(relpath)

    def _transition(self, job: Job, state: JobState) -> None:
        cond = self._conditions[job.id]
        with cond:
            job.state = state
            event: dict = {"state": state.value, "at": _now()}
            if state == JobState.FAILED and job.error:
                event["error"] = job.error
            job.events.append(event)
            cond.notify_all()

    def _log(self, job: Job, state: JobState) -> None:
        self.project.append_job_record(
            {
                "id": job.id,
                "module": job.module_name,
                "node": job.input_node,
                "params": job.params,
                "state": state.value,
                "error": job.error,
                "started_at": job.started_at,
                "finished_at": job.finished_at,
                "nodes": list(job.committed_node_ids),
                "edges": list(job.committed_edge_ids),
                "files": [relpath for relpath, _ in job.staged_files],
            }
        )

    # -- job queries -----------------------------------------------------------

    def _job(self, job_id: str) -> Job:
        with self._jobs_lock:
            try:
                return self._jobs[job_id]
            except KeyError:
                raise UnknownJob(f"no such job: {job_id}") from None

    def job_status(self, job_id: str) -> Job:
        """Read-only snapshot of a job."""
        job = self._job(job_id)
        cond = self._conditions[job_id]
        with cond:
            return Job(
                id=job.id,
                module_name=job.module_name,
                input_node=job.input_node,
                params=dict(job.params),
                state=job.state,
                staged_nodes=list(job.staged_nodes),
                staged_files=[(p, b"") for p, _ in job.staged_files],
                error=job.error,
                started_at=job.started_at,
                finished_at=job.finished_at,
                committed_node_ids=list(job.committed_node_ids),
                committed_edge_ids=list(job.committed_edge_ids),
                events=[dict(e) for e in job.events],
            )

    def wait(self, job_id: str, timeout: Optional[float] = None) -> Job:
        job = self._job(job_id)
        cond = self._conditions[job_id]
        deadline = None if timeout is None else time.monotonic() + timeout
        with cond:
            while job.state not in (JobState.SUCCEEDED, JobState.FAILED):
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    break
                cond.wait(remaining)
        return self.job_status(job_id)

    def job_events(self, job_id: str):
        """Yield state-change events in order, blocking until the job ends."""
        job = self._job(job_id)
        cond = self._conditions[job_id]
        index = 0
        while True:
            with cond:
                while index >= len(job.events):
                    cond.wait()
                batch = job.events[index:]
                index = len(job.events)
            for event in batch:
                yield dict(event)
            if batch and batch[-1]["state"] in (JobState.SUCCEEDED.value, JobState.FAILED.value):
                return

    def shutdown(self, wait: bool = True) -> None:
        self._executor.shutdown(wait=wait)


def wrap_external_tool(
    argv: list[str],
    output_kind: EntityKind,
    label: str,
    timeout: float = 60.0,
) -> ModuleImpl:
    """Build a module implementation around a child process whose stdout is a
    list literal: each element becomes one staged node.

    Occurrences of {value} in argv are replaced with the input node's value.
    """
    output_kind = EntityKind(output_kind)

    def implementation(ctx: ModuleContext) -> None:
        command = [arg.replace("{value}", ctx.node.value) for arg in argv]
        proc = subprocess.run(
            command, capture_output=True, text=True, timeout=timeout, check=False
        )
        if proc.returncode != 0:
            raise RuntimeError(
                f"{command[0]} exited {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        for item in interpret_list_output(proc.stdout):
            ctx.stage_node(output_kind, item, label)

    return implementation
