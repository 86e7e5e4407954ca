"""Investigation report rendering: figures plus delimited exports.

Produces a node-link overview of the entity graph (seeds in the middle,
derived knowledge fanned out by derivation depth), a token-frequency chart
when extracted tokens exist, and CSV files mirroring the graph content.
Layout here is presentation only; the graph store itself stays layout-free.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .graph import EntityGraph, EntityKind, ORIGIN_SEED  # noqa: E402
from .store import Project  # noqa: E402

KIND_COLORS = {
    EntityKind.PERSON: "#1f77b4",
    EntityKind.USERNAME: "#ff7f0e",
    EntityKind.EMAIL: "#2ca02c",
    EntityKind.PASSWORD: "#d62728",
    EntityKind.PHONE_NUMBER: "#9467bd",
    EntityKind.ADDRESS: "#8c564b",
    EntityKind.SOCIAL_PROFILE: "#e377c2",
    EntityKind.IMAGE_FILE: "#7f7f7f",
    EntityKind.TEXT_FILE: "#bcbd22",
    EntityKind.DOMAIN: "#17becf",
    EntityKind.ORGANIZATION: "#aec7e8",
    EntityKind.TOKEN: "#ffbb78",
    EntityKind.ATTRIBUTE: "#98df8a",
}


def radial_layout(graph: EntityGraph) -> dict[str, tuple[float, float]]:
    """Deterministic positions: BFS depth from seed nodes maps to ring
    radius; nodes within a ring spread evenly, ordered by id."""
    nodes = graph.nodes()
    depth: dict[str, int] = {}
    queue = deque()
    for node in nodes:
        if node.provenance.origin == ORIGIN_SEED:
            depth[node.id] = 0
            queue.append(node.id)
    while queue:
        current = queue.popleft()
        for _edge, neighbor in graph.neighbors(current, "out"):
            if neighbor.id not in depth:
                depth[neighbor.id] = depth[current] + 1
                queue.append(neighbor.id)
    orphan_depth = (max(depth.values()) + 1) if depth else 0
    for node in nodes:
        depth.setdefault(node.id, orphan_depth)

    rings: dict[int, list[str]] = {}
    for node in nodes:
        rings.setdefault(depth[node.id], []).append(node.id)
    positions: dict[str, tuple[float, float]] = {}
    for ring, members in sorted(rings.items()):
        members.sort()
        radius = float(ring)
        for i, node_id in enumerate(members):
            if ring == 0 and len(members) == 1:
                positions[node_id] = (0.0, 0.0)
                continue
            angle = 2 * math.pi * i / len(members) + ring * 0.5
            positions[node_id] = (radius * math.cos(angle), radius * math.sin(angle))
    return positions


def render_graph_figure(graph: EntityGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    positions = radial_layout(graph)
    fig, ax = plt.subplots(figsize=(9, 9))
    for edge in graph.edges():
        x0, y0 = positions[edge.from_id]
        x1, y1 = positions[edge.to_id]
        ax.plot([x0, x1], [y0, y1], color="#bbbbbb", linewidth=0.8, zorder=1)
    seen_kinds = []
    for node in graph.nodes():
        x, y = positions[node.id]
        color = KIND_COLORS.get(node.kind, "#333333")
        label = node.kind.value if node.kind not in seen_kinds else None
        if label:
            seen_kinds.append(node.kind)
        ax.scatter([x], [y], s=140, color=color, zorder=2, label=label)
        ax.annotate(
            node.display_label[:24],
            (x, y),
            textcoords="offset points",
            xytext=(0, 9),
            fontsize=7,
            ha="center",
        )
    if seen_kinds:
        ax.legend(loc="upper right", fontsize=7)
    ax.set_axis_off()
    ax.set_title("investigation graph")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_token_chart(token_rows: list[tuple[str, int]], path: Union[str, Path]) -> Path:
    path = Path(path)
    top = token_rows[:20]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(top))))
    labels = [t for t, _ in top][::-1]
    counts = [c for _, c in top][::-1]
    ax.barh(labels, counts, color="#ff7f0e")
    ax.set_xlabel("derivations")
    ax.set_title("extracted tokens")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_nodes_csv(graph: EntityGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["id", "kind", "value", "label", "origin", "module", "job", "source_category", "created_at"]
        )
        for n in graph.nodes():
            writer.writerow(
                [
                    n.id,
                    n.kind.value,
                    n.value,
                    n.display_label,
                    n.provenance.origin,
                    n.provenance.module_name or "",
                    n.provenance.job_id or "",
                    n.provenance.source_category.value if n.provenance.source_category else "",
                    n.created_at,
                ]
            )
    return path


def write_edges_csv(graph: EntityGraph, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "from", "to", "label", "job"])
        for e in graph.edges():
            writer.writerow([e.id, e.from_id, e.to_id, e.label, e.job_id or ""])
    return path


def token_rows(graph: EntityGraph) -> list[tuple[str, int]]:
    """Token node values with the number of derivation edges pointing at
    them (how many sources produced each token), most-derived first."""
    rows = []
    for node in graph.find_nodes(EntityKind.TOKEN):
        rows.append((node.value, len(graph.neighbors(node.id, "in"))))
    rows.sort(key=lambda r: (-r[1], r[0].lower()))
    return rows


def write_tokens_csv(rows: list[tuple[str, int]], path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["token", "sources"])
        writer.writerows(rows)
    return path


def generate_report(project: Project, out_dir: Union[str, Path]) -> dict[str, str]:
    """Render all report artifacts into out_dir; returns artifact paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = project.load_graph()
    artifacts = {
        "graph_figure": str(render_graph_figure(graph, out / "graph.png")),
        "nodes_csv": str(write_nodes_csv(graph, out / "nodes.csv")),
        "edges_csv": str(write_edges_csv(graph, out / "edges.csv")),
    }
    rows = token_rows(graph)
    if rows:
        artifacts["tokens_csv"] = str(write_tokens_csv(rows, out / "tokens.csv"))
        artifacts["token_chart"] = str(render_token_chart(rows, out / "tokens.png"))
    return artifacts
