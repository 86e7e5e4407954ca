/** SVG node-link canvas. Renders exactly the display graph (server graph
 * plus layout and optional grouping); clicking a node selects it.
 */

import { computeLayout } from "./layout.js";
import type { AppState } from "./state.js";
import type { GraphDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const KIND_COLORS: Record<string, string> = {
  person: "#1f77b4",
  username: "#ff7f0e",
  email: "#2ca02c",
  password: "#d62728",
  phone_number: "#9467bd",
  address: "#8c564b",
  social_profile: "#e377c2",
  image_file: "#7f7f7f",
  text_file: "#bcbd22",
  domain: "#17becf",
  organization: "#aec7e8",
  token: "#ffbb78",
  attribute: "#98df8a",
};

export class GraphCanvas {
  private readonly svg: SVGSVGElement;

  constructor(
    container: HTMLElement,
    private readonly state: AppState,
    private readonly width = 900,
    private readonly height = 600,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));
    this.svg.setAttribute("data-testid", "graph-canvas");
    container.appendChild(this.svg);
    state.subscribe(() => this.render());
    this.render();
  }

  /** Ids of nodes currently drawn (meta-nodes excluded): the server-authority
   * invariant is checked against this set. */
  renderedNodeIds(): string[] {
    return Array.from(this.svg.querySelectorAll("[data-node-id]")).map(
      (el) => el.getAttribute("data-node-id")!,
    );
  }

  render(): void {
    const display = this.state.displayGraph();
    // lay out the display shape: original edges plus meta edges
    const layoutInput: GraphDoc = {
      version: 1,
      nodes: [
        ...display.nodes,
        ...display.metaNodes.map((m) => ({
          id: m.id,
          kind: m.kind,
          value: m.id,
          label: m.label,
          provenance: { origin: "user_seed", module: null, job: null, source_category: null },
          created_at: "",
        })),
      ],
      edges: [
        ...display.edges,
        ...display.metaEdges.map((e, i) => ({
          id: `me${i}`,
          from: e.from,
          to: e.to,
          label: e.label,
          job: null,
        })),
      ],
    };
    const layout = computeLayout(layoutInput, { width: this.width, height: this.height });
    this.svg.replaceChildren();

    for (const edge of layoutInput.edges) {
      const a = layout.get(edge.from);
      const b = layout.get(edge.to);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", a.x.toFixed(1));
      line.setAttribute("y1", a.y.toFixed(1));
      line.setAttribute("x2", b.x.toFixed(1));
      line.setAttribute("y2", b.y.toFixed(1));
      line.setAttribute("stroke", "#bbb");
      line.setAttribute("data-edge-label", edge.label);
      this.svg.appendChild(line);
    }

    const selected = this.state.selectedNode();
    for (const node of display.nodes) {
      const point = layout.get(node.id);
      if (!point) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-node-id", node.id);
      group.setAttribute("data-kind", node.kind);
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", point.x.toFixed(1));
      circle.setAttribute("cy", point.y.toFixed(1));
      circle.setAttribute("r", "14");
      circle.setAttribute("fill", KIND_COLORS[node.kind] ?? "#333");
      if (selected && selected.id === node.id) {
        circle.setAttribute("stroke", "#000");
        circle.setAttribute("stroke-width", "3");
        group.setAttribute("data-selected", "true");
      }
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", point.x.toFixed(1));
      text.setAttribute("y", (point.y - 18).toFixed(1));
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("font-size", "10");
      text.textContent = node.label.slice(0, 24);
      group.appendChild(circle);
      group.appendChild(text);
      group.addEventListener("click", () => this.state.select(node.id));
      this.svg.appendChild(group);
    }

    for (const meta of display.metaNodes) {
      const point = layout.get(meta.id);
      if (!point) continue;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-meta-id", meta.id);
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", (point.x - 18).toFixed(1));
      rect.setAttribute("y", (point.y - 12).toFixed(1));
      rect.setAttribute("width", "36");
      rect.setAttribute("height", "24");
      rect.setAttribute("rx", "6");
      rect.setAttribute("fill", KIND_COLORS[meta.kind] ?? "#333");
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", point.x.toFixed(1));
      text.setAttribute("y", (point.y - 16).toFixed(1));
      text.setAttribute("text-anchor", "middle");
      text.setAttribute("font-size", "10");
      text.textContent = `${meta.members.length} × ${meta.label}`;
      group.appendChild(rect);
      group.appendChild(text);
      this.svg.appendChild(group);
    }
  }
}
