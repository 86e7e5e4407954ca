"""Project persistence: fixed folder layout, file containment, atomic saves.

A project is a directory:

    project.json   metadata
    graph.json     entity-graph export (the "database")
    jobs.log       append-only job records, one JSON object per line
    Files/         raw collected artifacts (crawled images, tweet dumps, ...)
    wordlists/     generated password-candidate files
    fixtures/      transport recordings and adapter fixtures
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

from .errors import IoError, PathOccupied, SchemaViolation
from .graph import FILES_DIR, EntityGraph

SCHEMA_VERSION = 1

_SUBDIRS = (FILES_DIR, "wordlists", "fixtures")
_META_FILE = "project.json"
_GRAPH_FILE = "graph.json"
_JOBS_FILE = "jobs.log"


@dataclass(frozen=True)
class ProjectMeta:
    name: str
    created_at: str
    schema_version: int = SCHEMA_VERSION


def sanitize_file_name(suggested: str) -> str:
    """Flatten any path-like input to one safe file name: separators become
    underscores, traversal components are dropped."""
    parts = [p for p in re.split(r"[\\/]+", suggested) if p not in ("", ".", "..")]
    name = "_".join(parts).strip()
    name = name.replace("\x00", "")
    return name or "file"


class Project:
    """One open investigation. All writes stay inside the project root."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self._file_lock = threading.Lock()
        self._reserved: set[str] = set()
        self._jobs_lock = threading.Lock()
        self._graph_lock = threading.Lock()

    # -- lifecycle -------------------------------------------------------

    @classmethod
    def init(cls, path: Union[str, Path], name: str) -> "Project":
        root = Path(path)
        if root.exists() and any(root.iterdir()):
            raise PathOccupied(f"{root} exists and is not empty")
        try:
            root.mkdir(parents=True, exist_ok=True)
            for sub in _SUBDIRS:
                (root / sub).mkdir()
            meta = {
                "name": name,
                "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "schema_version": SCHEMA_VERSION,
            }
            (root / _META_FILE).write_text(
                json.dumps(meta, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
            )
            (root / _JOBS_FILE).touch()
        except OSError as exc:
            raise IoError(f"cannot initialize project at {root}: {exc}") from exc
        project = cls(root)
        project.save_graph(EntityGraph())
        return project

    @classmethod
    def open(cls, path: Union[str, Path]) -> "Project":
        root = Path(path)
        if not (root / _META_FILE).is_file():
            raise IoError(f"{root} is not a project (missing {_META_FILE})")
        return cls(root)

    @property
    def meta(self) -> ProjectMeta:
        try:
            raw = json.loads((self.root / _META_FILE).read_text("utf-8"))
            return ProjectMeta(raw["name"], raw["created_at"], raw["schema_version"])
        except OSError as exc:
            raise IoError(str(exc)) from exc
        except (KeyError, ValueError, TypeError) as exc:
            raise SchemaViolation(f"bad {_META_FILE}: {exc}") from exc

    @property
    def files_dir(self) -> Path:
        return self.root / FILES_DIR

    @property
    def wordlists_dir(self) -> Path:
        return self.root / "wordlists"

    @property
    def fixtures_dir(self) -> Path:
        return self.root / "fixtures"

    # -- raw file storage --------------------------------------------------

    def store_file(self, suggested_name: str, data: bytes) -> str:
        """Write under Files/, resolving name collisions with a numeric
        suffix before the extension (name, name1, name2, ...). Returns the
        project-relative path."""
        with self._file_lock:
            relpath = self._free_name(sanitize_file_name(suggested_name))
            self._reserved.add(relpath)
        try:
            self.write_reserved(relpath, data)
        except IoError:
            self.release_reservation(relpath)
            raise
        return relpath

    def reserve_file_name(self, suggested_name: str) -> str:
        """Pick (and hold) the next free collision-suffixed name without
        writing anything yet; used by the job engine's staged commits."""
        with self._file_lock:
            relpath = self._free_name(sanitize_file_name(suggested_name))
            self._reserved.add(relpath)
            return relpath

    def write_reserved(self, relpath: str, data: bytes) -> None:
        target = self.resolve(relpath)
        try:
            target.write_bytes(data)
        except OSError as exc:
            raise IoError(f"cannot write {relpath}: {exc}") from exc
        with self._file_lock:
            self._reserved.discard(relpath)

    def release_reservation(self, relpath: str) -> None:
        with self._file_lock:
            self._reserved.discard(relpath)

    def remove_file(self, relpath: str) -> None:
        try:
            self.resolve(relpath).unlink(missing_ok=True)
        except OSError as exc:
            raise IoError(f"cannot remove {relpath}: {exc}") from exc

    def _free_name(self, name: str) -> str:
        stem, ext = os.path.splitext(name)
        n = 0
        while True:
            candidate = f"{FILES_DIR}/{stem}{n if n else ''}{ext}"
            if candidate not in self._reserved and not self.resolve(candidate).exists():
                return candidate
            n += 1

    def resolve(self, relpath: str) -> Path:
        """Containment check: the resolved path must stay inside root."""
        target = (self.root / relpath).resolve()
        root = self.root.resolve()
        if root != target and root not in target.parents:
            raise IoError(f"path escapes project root: {relpath!r}")
        return target

    # -- graph persistence ---------------------------------------------------

    def save_graph(self, graph: EntityGraph) -> None:
        """Atomic: write a temp file, then rename over graph.json.
        Concurrent saves serialize; the last writer wins."""
        data = graph.export_bytes()
        with self._graph_lock:
            tmp = self.root / f"{_GRAPH_FILE}.{os.getpid()}.{threading.get_ident()}.tmp"
            try:
                tmp.write_bytes(data)
                tmp.replace(self.root / _GRAPH_FILE)
            except OSError as exc:
                tmp.unlink(missing_ok=True)
                raise IoError(f"cannot save graph: {exc}") from exc

    def load_graph(self) -> EntityGraph:
        path = self.root / _GRAPH_FILE
        try:
            raw = path.read_text("utf-8")
        except OSError as exc:
            raise IoError(f"cannot read graph: {exc}") from exc
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"graph.json is not valid JSON: {exc}") from exc
        return EntityGraph.import_graph(doc)

    # -- job log ---------------------------------------------------------------

    def append_job_record(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, sort_keys=True)
        with self._jobs_lock:
            try:
                with open(self.root / _JOBS_FILE, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
            except OSError as exc:
                raise IoError(f"cannot append job record: {exc}") from exc

    def read_job_records(self) -> list[dict]:
        try:
            text = (self.root / _JOBS_FILE).read_text("utf-8")
        except FileNotFoundError:
            return []
        except OSError as exc:
            raise IoError(str(exc)) from exc
        records = []
        for line in text.splitlines():
            if line.strip():
                records.append(json.loads(line))
        return records

    def job_record(self, job_id: str) -> Optional[dict]:
        for record in self.read_job_records():
            if record.get("id") == job_id:
                return record
        return None
