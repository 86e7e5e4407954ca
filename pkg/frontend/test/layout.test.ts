import { describe, expect, it } from "vitest";

import { computeLayout, mulberry32 } from "../src/layout.js";
import type { GraphDoc, NodeDoc } from "../src/types.js";

function node(id: string, kind = "token"): NodeDoc {
  return {
    id,
    kind,
    value: id,
    label: id,
    provenance: { origin: "user_seed", module: null, job: null, source_category: null },
    created_at: "2026-01-01T00:00:00+00:00",
  };
}

function starGraph(leaves: number): GraphDoc {
  const nodes = [node("hub", "username")];
  const edges = [];
  for (let i = 0; i < leaves; i++) {
    nodes.push(node(`leaf${i}`, "image_file"));
    edges.push({ id: `e${i}`, from: "hub", to: `leaf${i}`, label: "crawled-image", job: null });
  }
  return { version: 1, nodes, edges };
}

describe("mulberry32", () => {
  it("is deterministic per seed", () => {
    const a = mulberry32(7);
    const b = mulberry32(7);
    const c = mulberry32(8);
    const seqA = [a(), a(), a()];
    const seqB = [b(), b(), b()];
    expect(seqA).toEqual(seqB);
    expect(seqA).not.toEqual([c(), c(), c()]);
  });
});

describe("computeLayout", () => {
  it("is deterministic for the same document", () => {
    const graph = starGraph(12);
    const first = computeLayout(graph);
    const second = computeLayout(graph);
    expect([...first.entries()]).toEqual([...second.entries()]);
  });

  it("positions every node inside the viewport", () => {
    const graph = starGraph(19);
    const layout = computeLayout(graph, { width: 900, height: 600 });
    expect(layout.size).toBe(20);
    for (const { x, y } of layout.values()) {
      expect(Number.isFinite(x)).toBe(true);
      expect(Number.isFinite(y)).toBe(true);
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(900);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(600);
    }
  });

  it("keeps each cluster's leaves nearer to their own hub", () => {
    // two disjoint stars: every leaf must end up closer to its hub than to
    // the other star's hub, or the canvas would paint tangled clusters
    const graph: GraphDoc = { version: 1, nodes: [], edges: [] };
    for (const hub of ["hubA", "hubB"]) {
      graph.nodes.push(node(hub, "username"));
      for (let i = 0; i < 5; i++) {
        const id = `${hub}-leaf${i}`;
        graph.nodes.push(node(id, "image_file"));
        graph.edges.push({ id: `e-${id}`, from: hub, to: id, label: "crawled-image", job: null });
      }
    }
    const layout = computeLayout(graph);
    const dist = (a: string, b: string) => {
      const p = layout.get(a)!;
      const q = layout.get(b)!;
      return Math.hypot(p.x - q.x, p.y - q.y);
    };
    for (const hub of ["hubA", "hubB"]) {
      const other = hub === "hubA" ? "hubB" : "hubA";
      for (let i = 0; i < 5; i++) {
        expect(dist(`${hub}-leaf${i}`, hub)).toBeLessThan(dist(`${hub}-leaf${i}`, other));
      }
    }
  });

  it("handles the empty graph", () => {
    expect(computeLayout({ version: 1, nodes: [], edges: [] }).size).toBe(0);
  });
});
