import csv

from idrecon.graph import EntityGraph, EntityKind, Provenance
from idrecon.report import (
    generate_report,
    radial_layout,
    render_graph_figure,
    token_rows,
    write_edges_csv,
    write_nodes_csv,
)
from idrecon.store import Project


def build_star_graph():
    g = EntityGraph()
    seed = g.upsert_node(EntityKind.USERNAME, "olafscholz", Provenance.seed())
    for i in range(5):
        img = g.upsert_node(
            EntityKind.IMAGE_FILE,
            f"Files/img{i}.jpg",
            Provenance.module("image-crawl", "j1"),
        )
        g.add_edge(seed, img, "crawled-image", "j1")
    tok = g.upsert_node(EntityKind.TOKEN, "Berlin", Provenance.module("ner-extract", "j2"))
    g.add_edge(seed, tok, "ner-token", "j2")
    return g, seed


class TestLayout:
    def test_seed_at_center_and_ring_structure(self):
        g, seed = build_star_graph()
        positions = radial_layout(g)
        assert positions[seed] == (0.0, 0.0)
        for node in g.nodes():
            if node.id != seed:
                x, y = positions[node.id]
                assert abs((x * x + y * y) ** 0.5 - 1.0) < 1e-9  # depth-1 ring

    def test_deterministic(self):
        g, _ = build_star_graph()
        assert radial_layout(g) == radial_layout(g)

    def test_orphans_get_outer_ring(self):
        g, _ = build_star_graph()
        # an imported node nobody points at and that is not a seed
        orphan = g.upsert_node(EntityKind.TOKEN, "floating", Provenance.module("x", "j9"))
        positions = radial_layout(g)
        x, y = positions[orphan]
        assert (x * x + y * y) ** 0.5 > 1.5


class TestArtifacts:
    def test_figure_renders(self, tmp_path):
        g, _ = build_star_graph()
        out = render_graph_figure(g, tmp_path / "g.png")
        assert out.stat().st_size > 1000

    def test_csvs(self, tmp_path):
        g, _ = build_star_graph()
        nodes_path = write_nodes_csv(g, tmp_path / "nodes.csv")
        edges_path = write_edges_csv(g, tmp_path / "edges.csv")
        with open(nodes_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == g.node_count()
        assert rows[0]["kind"] == "username"
        with open(edges_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == g.edge_count()

    def test_token_rows_ranked_by_in_degree(self):
        g, seed = build_star_graph()
        other = g.upsert_node(EntityKind.USERNAME, "second", Provenance.seed())
        tok = g.node_by_value(EntityKind.TOKEN, "Berlin")
        g.add_edge(other, tok.id, "ner-token")
        rows = token_rows(g)
        assert rows[0] == ("Berlin", 2)

    def test_generate_report_full(self, tmp_path):
        project = Project.init(tmp_path / "p", "report")
        g, _ = build_star_graph()
        project.save_graph(g)
        artifacts = generate_report(project, tmp_path / "out")
        assert set(artifacts) == {
            "graph_figure", "nodes_csv", "edges_csv", "tokens_csv", "token_chart",
        }

    def test_report_without_tokens_skips_chart(self, tmp_path):
        project = Project.init(tmp_path / "p", "report")
        artifacts = generate_report(project, tmp_path / "out")
        assert "token_chart" not in artifacts
        assert "graph_figure" in artifacts
