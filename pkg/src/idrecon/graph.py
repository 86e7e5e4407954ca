"""Provenance-carrying entity graph: the investigation store.

Every identity artifact (username, email, image file, extracted token, ...)
is one typed node; every derivation step made by a transform module is one
labeled edge. Nodes deduplicate on (kind, canonical value) so module re-runs
are idempotent and the graph stays readable.
"""

from __future__ import annotations

import json
import posixpath
import threading
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Callable, Optional

from .errors import (
    DanglingEdge,
    DuplicateId,
    EmptyValue,
    InvalidPathValue,
    SchemaViolation,
    UnknownNode,
)


class EntityKind(str, Enum):
    PERSON = "person"
    USERNAME = "username"
    EMAIL = "email"
    PASSWORD = "password"
    PHONE_NUMBER = "phone_number"
    ADDRESS = "address"
    SOCIAL_PROFILE = "social_profile"
    IMAGE_FILE = "image_file"
    TEXT_FILE = "text_file"
    DOMAIN = "domain"
    ORGANIZATION = "organization"
    TOKEN = "token"
    ATTRIBUTE = "attribute"


class SourceCategory(str, Enum):
    SOCIAL_MEDIA = "social_media"
    SEARCH_ENGINE = "search_engine"
    PUBLIC_MEDIA = "public_media"
    PUBLIC_RECORD = "public_record"
    REPOSITORY = "repository"
    ARCHIVE = "archive"
    LEAK_PAGE = "leak_page"
    DARK_DEEP_WEB = "dark_deep_web"
    OTHER_INTERNET = "other_internet"
    ORG_WEBSITE = "org_website"
    NETWORK = "network"


# Kinds whose value is a relative file path under the project Files/ dir.
FILE_KINDS = frozenset({EntityKind.IMAGE_FILE, EntityKind.TEXT_FILE})

# Kinds canonicalized to lowercase (person names keep their case for display).
LOWERCASE_KINDS = frozenset({EntityKind.EMAIL, EntityKind.USERNAME, EntityKind.DOMAIN})

FILES_DIR = "Files"

ORIGIN_SEED = "user_seed"
ORIGIN_MODULE = "module_output"


@dataclass(frozen=True)
class Provenance:
    """Where a node came from: a user seed or a specific module job."""

    origin: str
    module_name: Optional[str] = None
    job_id: Optional[str] = None
    source_category: Optional[SourceCategory] = None

    def __post_init__(self):
        if self.origin == ORIGIN_MODULE:
            if not self.module_name or not self.job_id:
                raise ValueError("module provenance requires module_name and job_id")
        elif self.origin == ORIGIN_SEED:
            if self.module_name or self.job_id:
                raise ValueError("seed provenance must not carry module_name/job_id")
        else:
            raise ValueError(f"unknown provenance origin: {self.origin!r}")

    @classmethod
    def seed(cls, source_category: Optional[SourceCategory] = None) -> "Provenance":
        return cls(ORIGIN_SEED, source_category=source_category)

    @classmethod
    def module(
        cls,
        module_name: str,
        job_id: str,
        source_category: Optional[SourceCategory] = None,
    ) -> "Provenance":
        return cls(ORIGIN_MODULE, module_name, job_id, source_category)


@dataclass(frozen=True)
class EntityNode:
    id: str
    kind: EntityKind
    value: str
    display_label: str
    provenance: Provenance
    created_at: str  # RFC3339, stored as string so exports round-trip byte-exact


@dataclass(frozen=True)
class DerivationEdge:
    id: str
    from_id: str
    to_id: str
    label: str
    job_id: Optional[str] = None


def canonicalize_value(kind: EntityKind, value: str) -> str:
    """Trim + NFC-normalize a node value; lowercase identity kinds; validate
    file-kind values as relative paths contained in Files/."""
    canon = unicodedata.normalize("NFC", value).strip()
    if kind in LOWERCASE_KINDS:
        canon = canon.lower()
    if not canon:
        raise EmptyValue(f"{kind.value} value is empty after canonicalization")
    if kind in FILE_KINDS:
        norm = posixpath.normpath(canon.replace("\\", "/"))
        if norm.startswith("/") or norm.split("/")[0] != FILES_DIR or ".." in norm.split("/"):
            raise InvalidPathValue(
                f"{kind.value} value must be a relative path under {FILES_DIR}/: {value!r}"
            )
        canon = norm
    return canon


def _now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def parse_rfc3339(text: str) -> datetime:
    """Tolerant RFC3339 parse (accepts trailing Z on Python 3.10)."""
    return datetime.fromisoformat(text.replace("Z", "+00:00"))


class EntityGraph:
    """In-memory graph with a single-writer lock and deterministic exports.

    All mutations serialize through one re-entrant lock; reads copy under the
    same lock so concurrent readers always see a consistent snapshot.
    """

    def __init__(self, clock: Callable[[], str] = _now_rfc3339):
        self._lock = threading.RLock()
        self._clock = clock
        self._nodes: dict[str, EntityNode] = {}
        self._edges: dict[str, DerivationEdge] = {}
        self._node_key: dict[tuple[EntityKind, str], str] = {}
        self._edge_key: dict[tuple[str, str, str], str] = {}
        self._out: dict[str, list[str]] = {}
        self._in: dict[str, list[str]] = {}
        self._edge_seq: dict[str, int] = {}  # edge id -> creation sequence
        self._node_counter = 0
        self._edge_counter = 0

    # -- id allocation -------------------------------------------------

    def _next_node_id(self) -> str:
        while True:
            self._node_counter += 1
            nid = f"n{self._node_counter:08d}"
            if nid not in self._nodes:
                return nid

    def _next_edge_id(self) -> str:
        while True:
            self._edge_counter += 1
            eid = f"e{self._edge_counter:08d}"
            if eid not in self._edges:
                return eid

    # -- mutations -----------------------------------------------------

    def upsert_node(
        self,
        kind: EntityKind,
        value: str,
        provenance: Provenance,
        label: Optional[str] = None,
    ) -> str:
        """Insert a node, or return the existing id for (kind, canonical value).

        The original node's provenance and label are kept on a duplicate
        upsert: first derivation wins.
        """
        kind = EntityKind(kind)
        canon = canonicalize_value(kind, value)
        with self._lock:
            existing = self._node_key.get((kind, canon))
            if existing is not None:
                return existing
            nid = self._next_node_id()
            if label is None:
                label = posixpath.basename(canon) if kind in FILE_KINDS else canon
            node = EntityNode(
                id=nid,
                kind=kind,
                value=canon,
                display_label=label,
                provenance=provenance,
                created_at=self._clock(),
            )
            self._nodes[nid] = node
            self._node_key[(kind, canon)] = nid
            self._out[nid] = []
            self._in[nid] = []
            return nid

    def add_edge(
        self, from_id: str, to_id: str, label: str, job_id: Optional[str] = None
    ) -> str:
        """Record a derivation edge; duplicate (from, to, label) returns the
        existing edge id."""
        with self._lock:
            for nid in (from_id, to_id):
                if nid not in self._nodes:
                    raise UnknownNode(f"no such node: {nid}")
            key = (from_id, to_id, label)
            existing = self._edge_key.get(key)
            if existing is not None:
                return existing
            eid = self._next_edge_id()
            edge = DerivationEdge(eid, from_id, to_id, label, job_id)
            self._edges[eid] = edge
            self._edge_key[key] = eid
            self._edge_seq[eid] = len(self._edge_seq)
            self._out[from_id].append(eid)
            self._in[to_id].append(eid)
            return eid

    # -- reads -----------------------------------------------------------

    def node(self, node_id: str) -> EntityNode:
        with self._lock:
            try:
                return self._nodes[node_id]
            except KeyError:
                raise UnknownNode(f"no such node: {node_id}") from None

    def node_by_value(self, kind: EntityKind, value: str) -> Optional[EntityNode]:
        canon = canonicalize_value(EntityKind(kind), value)
        with self._lock:
            nid = self._node_key.get((EntityKind(kind), canon))
            return self._nodes[nid] if nid else None

    def neighbors(
        self, node_id: str, direction: str = "both"
    ) -> list[tuple[DerivationEdge, EntityNode]]:
        """Adjacent (edge, node) pairs ordered by edge creation time, ties by id."""
        if direction not in ("out", "in", "both"):
            raise ValueError(f"direction must be out/in/both, got {direction!r}")
        with self._lock:
            if node_id not in self._nodes:
                raise UnknownNode(f"no such node: {node_id}")
            edge_ids: set[str] = set()
            if direction in ("out", "both"):
                edge_ids.update(self._out[node_id])
            if direction in ("in", "both"):
                edge_ids.update(self._in[node_id])
            ordered = sorted(edge_ids, key=lambda e: (self._edge_seq[e], e))
            result = []
            for eid in ordered:
                edge = self._edges[eid]
                other = edge.to_id if edge.from_id == node_id else edge.from_id
                result.append((edge, self._nodes[other]))
            return result

    def find_nodes(
        self,
        kind: Optional[EntityKind] = None,
        value_substring: Optional[str] = None,
    ) -> list[EntityNode]:
        """Filter nodes; case-insensitive substring match on canonical value.

        Order is deterministic: creation time, then id.
        """
        needle = value_substring.lower() if value_substring is not None else None
        with self._lock:
            found = [
                n
                for n in self._nodes.values()
                if (kind is None or n.kind == EntityKind(kind))
                and (needle is None or needle in n.value.lower())
            ]
        return sorted(found, key=lambda n: (n.created_at, n.id))

    def nodes(self) -> list[EntityNode]:
        with self._lock:
            return sorted(self._nodes.values(), key=lambda n: (n.created_at, n.id))

    def edges(self) -> list[DerivationEdge]:
        with self._lock:
            return sorted(self._edges.values(), key=lambda e: (self._edge_seq[e.id], e.id))

    def node_count(self) -> int:
        with self._lock:
            return len(self._nodes)

    def edge_count(self) -> int:
        with self._lock:
            return len(self._edges)

    # -- export / import -------------------------------------------------

    def export_graph(self) -> dict:
        """Graph document (see the JSON schema in the README): nodes sorted by
        (created_at, id), edges in creation order."""
        with self._lock:
            nodes = sorted(self._nodes.values(), key=lambda n: (n.created_at, n.id))
            edges = sorted(self._edges.values(), key=lambda e: (self._edge_seq[e.id], e.id))
            return {
                "version": 1,
                "nodes": [
                    {
                        "id": n.id,
                        "kind": n.kind.value,
                        "value": n.value,
                        "label": n.display_label,
                        "provenance": {
                            "origin": n.provenance.origin,
                            "module": n.provenance.module_name,
                            "job": n.provenance.job_id,
                            "source_category": (
                                n.provenance.source_category.value
                                if n.provenance.source_category
                                else None
                            ),
                        },
                        "created_at": n.created_at,
                    }
                    for n in nodes
                ],
                "edges": [
                    {
                        "id": e.id,
                        "from": e.from_id,
                        "to": e.to_id,
                        "label": e.label,
                        "job": e.job_id,
                    }
                    for e in edges
                ],
            }

    def export_bytes(self) -> bytes:
        """UTF-8, LF, 2-space indent; byte-identical for an unchanged graph."""
        doc = self.export_graph()
        return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")

    @classmethod
    def import_graph(cls, document: dict, clock: Callable[[], str] = _now_rfc3339) -> "EntityGraph":
        """Rebuild a graph from an exported document, preserving ids."""
        if not isinstance(document, dict):
            raise SchemaViolation("graph document must be a JSON object")
        if document.get("version") != 1:
            raise SchemaViolation(f"unsupported graph version: {document.get('version')!r}")
        nodes = document.get("nodes")
        edges = document.get("edges")
        if not isinstance(nodes, list) or not isinstance(edges, list):
            raise SchemaViolation("graph document requires 'nodes' and 'edges' arrays")

        g = cls(clock=clock)
        for raw in nodes:
            node = _node_from_doc(raw)
            if node.id in g._nodes:
                raise DuplicateId(f"duplicated node id: {node.id}")
            key = (node.kind, node.value)
            if key in g._node_key:
                raise DuplicateId(
                    f"duplicated (kind, value): ({node.kind.value}, {node.value!r})"
                )
            g._nodes[node.id] = node
            g._node_key[key] = node.id
            g._out[node.id] = []
            g._in[node.id] = []
        for raw in edges:
            edge = _edge_from_doc(raw)
            if edge.id in g._edges:
                raise DuplicateId(f"duplicated edge id: {edge.id}")
            for endpoint in (edge.from_id, edge.to_id):
                if endpoint not in g._nodes:
                    raise DanglingEdge(f"edge {edge.id} references absent node {endpoint}")
            key = (edge.from_id, edge.to_id, edge.label)
            if key in g._edge_key:
                raise DuplicateId(f"duplicated edge (from,to,label): {key!r}")
            g._edges[edge.id] = edge
            g._edge_key[key] = edge.id
            g._edge_seq[edge.id] = len(g._edge_seq)
            g._out[edge.from_id].append(edge.id)
            g._in[edge.to_id].append(edge.id)

        g._node_counter = _max_seq(g._nodes, "n")
        g._edge_counter = _max_seq(g._edges, "e")
        return g

    # -- engine support ----------------------------------------------------

    def snapshot_state(self) -> dict:
        """Shallow-copy internal state for atomic commit rollback."""
        with self._lock:
            return {
                "nodes": dict(self._nodes),
                "edges": dict(self._edges),
                "node_key": dict(self._node_key),
                "edge_key": dict(self._edge_key),
                "out": {k: list(v) for k, v in self._out.items()},
                "in": {k: list(v) for k, v in self._in.items()},
                "edge_seq": dict(self._edge_seq),
                "node_counter": self._node_counter,
                "edge_counter": self._edge_counter,
            }

    def restore_state(self, snap: dict) -> None:
        with self._lock:
            self._nodes = snap["nodes"]
            self._edges = snap["edges"]
            self._node_key = snap["node_key"]
            self._edge_key = snap["edge_key"]
            self._out = snap["out"]
            self._in = snap["in"]
            self._edge_seq = snap["edge_seq"]
            self._node_counter = snap["node_counter"]
            self._edge_counter = snap["edge_counter"]

    @property
    def lock(self) -> threading.RLock:
        return self._lock

    def verify_integrity(self) -> None:
        """Raise AssertionError if any structural invariant is violated."""
        with self._lock:
            for e in self._edges.values():
                assert e.from_id in self._nodes, f"edge {e.id}: dangling from"
                assert e.to_id in self._nodes, f"edge {e.id}: dangling to"
            assert len(self._node_key) == len(self._nodes), "dedup key map out of sync"
            for (kind, value), nid in self._node_key.items():
                node = self._nodes[nid]
                assert node.kind == kind and node.value == value
            for (f, t, lbl), eid in self._edge_key.items():
                edge = self._edges[eid]
                assert (edge.from_id, edge.to_id, edge.label) == (f, t, lbl)


def _node_from_doc(raw: object) -> EntityNode:
    if not isinstance(raw, dict):
        raise SchemaViolation("node entry must be an object")
    try:
        kind = EntityKind(raw["kind"])
        prov_raw = raw["provenance"]
        cat = prov_raw.get("source_category")
        prov = Provenance(
            origin=prov_raw["origin"],
            module_name=prov_raw.get("module"),
            job_id=prov_raw.get("job"),
            source_category=SourceCategory(cat) if cat else None,
        )
        node = EntityNode(
            id=raw["id"],
            kind=kind,
            value=raw["value"],
            display_label=raw["label"],
            provenance=prov,
            created_at=raw["created_at"],
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaViolation(f"bad node entry: {exc}") from exc
    if not isinstance(node.id, str) or not node.id:
        raise SchemaViolation("node id must be a non-empty string")
    try:
        if canonicalize_value(node.kind, node.value) != node.value:
            raise SchemaViolation(f"node {node.id}: value not in canonical form")
        parse_rfc3339(node.created_at)
    except (EmptyValue, InvalidPathValue, ValueError) as exc:
        raise SchemaViolation(f"node {node.id}: {exc}") from exc
    return node


def _edge_from_doc(raw: object) -> DerivationEdge:
    if not isinstance(raw, dict):
        raise SchemaViolation("edge entry must be an object")
    try:
        edge = DerivationEdge(
            id=raw["id"],
            from_id=raw["from"],
            to_id=raw["to"],
            label=raw["label"],
            job_id=raw.get("job"),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaViolation(f"bad edge entry: {exc}") from exc
    if not isinstance(edge.id, str) or not edge.id:
        raise SchemaViolation("edge id must be a non-empty string")
    if not isinstance(edge.label, str):
        raise SchemaViolation(f"edge {edge.id}: label must be a string")
    return edge


def _max_seq(table: dict, prefix: str) -> int:
    best = 0
    for key in table:
        if key.startswith(prefix) and key[len(prefix):].isdigit():
            best = max(best, int(key[len(prefix):]))
    return best
