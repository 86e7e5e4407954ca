/** Client-side force layout with a deterministic seed.
 *
 * The server stores no positions; the same graph document always lays out
 * the same way so snapshots and tests stay stable.
 */

import type { GraphDoc } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export type Layout = Map<string, Point>;

/** mulberry32: tiny seeded PRNG, good enough for jittering start positions. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  seed?: number;
  iterations?: number;
  width?: number;
  height?: number;
  springLength?: number;
}

export function computeLayout(graph: GraphDoc, options: LayoutOptions = {}): Layout {
  const { seed = 42, iterations = 200, width = 900, height = 600, springLength = 90 } = options;
  const rng = mulberry32(seed);
  const ids = graph.nodes.map((n) => n.id);
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  const layout: Layout = new Map();
  if (n === 0) return layout;

  const edges: Array<[number, number]> = [];
  const parentOf = new Map<number, number>();
  for (const e of graph.edges) {
    const a = index.get(e.from);
    const b = index.get(e.to);
    if (a === undefined || b === undefined || a === b) continue;
    edges.push([a, b]);
    if (!parentOf.has(b)) parentOf.set(b, a);
  }

  // structural start: roots on a ring, children jittered next to their
  // parent, so clusters are coherent before the simulation begins
  const x = new Float64Array(n);
  const y = new Float64Array(n);
  const placed = new Array<boolean>(n).fill(false);
  const ringRadius = Math.min(width, height) / 3;
  let rootCount = 0;
  for (let i = 0; i < n; i++) {
    const parent = parentOf.get(i);
    if (parent === undefined || parent === i) rootCount++;
  }
  let ringSlot = 0;
  const place = (i: number): void => {
    if (placed[i]) return;
    placed[i] = true; // set first: breaks derivation cycles
    const parent = parentOf.get(i);
    if (parent !== undefined && parent !== i) {
      place(parent);
      const angle = 2 * Math.PI * rng();
      x[i] = x[parent] + springLength * 0.5 * Math.cos(angle);
      y[i] = y[parent] + springLength * 0.5 * Math.sin(angle);
    } else {
      const angle = (2 * Math.PI * ringSlot++) / Math.max(1, rootCount) + rng() * 0.1;
      x[i] = ringRadius * Math.cos(angle);
      y[i] = ringRadius * Math.sin(angle);
    }
  };
  for (let i = 0; i < n; i++) place(i);

  const repulsion = 2000;
  const springK = 0.15;
  const gravity = 0.003;
  const dt = 0.3;
  for (let step = 0; step < iterations; step++) {
    const fx = new Float64Array(n);
    const fy = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = x[i] - x[j];
        let dy = y[i] - y[j];
        let d2 = dx * dx + dy * dy;
        if (d2 < 0.01) {
          // deterministic tie-break for coincident nodes
          dx = 0.1 * ((i - j) % 3 || 1);
          dy = 0.1;
          d2 = dx * dx + dy * dy;
        }
        const force = repulsion / d2;
        const d = Math.sqrt(d2);
        fx[i] += (force * dx) / d;
        fy[i] += (force * dy) / d;
        fx[j] -= (force * dx) / d;
        fy[j] -= (force * dy) / d;
      }
    }
    for (const [a, b] of edges) {
      const dx = x[b] - x[a];
      const dy = y[b] - y[a];
      const d = Math.sqrt(dx * dx + dy * dy) || 1;
      const pull = springK * (d - springLength);
      fx[a] += (pull * dx) / d;
      fy[a] += (pull * dy) / d;
      fx[b] -= (pull * dx) / d;
      fy[b] -= (pull * dy) / d;
    }
    const cooling = 1 - step / iterations;
    for (let i = 0; i < n; i++) {
      fx[i] -= gravity * x[i];
      fy[i] -= gravity * y[i];
      const limit = 30 * cooling + 1;
      x[i] += Math.max(-limit, Math.min(limit, fx[i] * dt));
      y[i] += Math.max(-limit, Math.min(limit, fy[i] * dt));
    }
  }

  // normalize into the viewport with a margin
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (let i = 0; i < n; i++) {
    minX = Math.min(minX, x[i]);
    maxX = Math.max(maxX, x[i]);
    minY = Math.min(minY, y[i]);
    maxY = Math.max(maxY, y[i]);
  }
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const margin = 40;
  for (let i = 0; i < n; i++) {
    layout.set(ids[i], {
      x: margin + ((x[i] - minX) / spanX) * (width - 2 * margin),
      y: margin + ((y[i] - minY) / spanY) * (height - 2 * margin),
    });
  }
  return layout;
}
