/** Canvas/application state. The server graph is authoritative: the UI only
 * ever renders what the last GET /api/graph returned, plus client-side
 * layout and display-only grouping.
 */

import { DEFAULT_GROUPING_THRESHOLD, DisplayGraph, groupGraph } from "./grouping.js";
import type { GraphDoc, NodeDoc } from "./types.js";
import { emptyGraph } from "./types.js";

export type Listener = () => void;

export class AppState {
  private graph: GraphDoc = emptyGraph();
  private selected: string | null = null;
  private runningJobs = new Set<string>();
  private listeners = new Set<Listener>();
  groupingEnabled = false;
  groupingThreshold = DEFAULT_GROUPING_THRESHOLD;

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Replace the whole graph with the server snapshot (server authority). */
  setGraph(doc: GraphDoc): void {
    this.graph = doc;
    if (this.selected && !doc.nodes.some((n) => n.id === this.selected)) {
      this.selected = null;
    }
    this.notify();
  }

  getGraph(): GraphDoc {
    return this.graph;
  }

  nodeById(id: string): NodeDoc | undefined {
    return this.graph.nodes.find((n) => n.id === id);
  }

  select(id: string | null): void {
    if (id !== null && !this.graph.nodes.some((n) => n.id === id)) {
      return; // never select something the server does not know
    }
    this.selected = id;
    this.notify();
  }

  selectedNode(): NodeDoc | null {
    return this.selected ? this.nodeById(this.selected) ?? null : null;
  }

  jobStarted(jobId: string): void {
    this.runningJobs.add(jobId);
    this.notify();
  }

  jobFinished(jobId: string): void {
    this.runningJobs.delete(jobId);
    this.notify();
  }

  runningJobCount(): number {
    return this.runningJobs.size;
  }

  setGrouping(enabled: boolean): void {
    this.groupingEnabled = enabled;
    this.notify();
  }

  displayGraph(): DisplayGraph {
    return groupGraph(this.graph, this.groupingEnabled, this.groupingThreshold);
  }

  /** Out-neighbors of the selected node, in server edge order. */
  selectedOutNeighbors(): Array<{ label: string; node: NodeDoc }> {
    const node = this.selectedNode();
    if (!node) return [];
    const byId = new Map(this.graph.nodes.map((n) => [n.id, n]));
    const result: Array<{ label: string; node: NodeDoc }> = [];
    for (const edge of this.graph.edges) {
      if (edge.from === node.id) {
        const target = byId.get(edge.to);
        if (target) result.push({ label: edge.label, node: target });
      }
    }
    return result;
  }

  /** Token values reachable from the selected node, server order. */
  selectedTokens(): string[] {
    return this.selectedOutNeighbors()
      .filter((entry) => entry.node.kind === "token")
      .map((entry) => entry.node.value);
  }
}
