/** Module picker: lists modules applicable to the selected node (the server
 * remains authoritative; a 409 is surfaced as a toast), generates param
 * forms from each module's param schema, and runs jobs.
 */

import { ApiError, ApiSurface } from "./client.js";
import type { AppState } from "./state.js";
import type { ModuleDoc } from "./types.js";

export class ModuleMenu {
  readonly root: HTMLElement;
  private readonly toast: HTMLElement;
  private modules: ModuleDoc[] = [];
  private lastKind: string | null = null;

  constructor(
    container: HTMLElement,
    private readonly state: AppState,
    private readonly client: ApiSurface,
  ) {
    this.root = document.createElement("div");
    this.root.setAttribute("data-testid", "module-menu");
    this.toast = document.createElement("div");
    this.toast.setAttribute("data-testid", "toast");
    container.append(this.root, this.toast);
    state.subscribe(() => void this.refresh());
  }

  async refresh(): Promise<void> {
    const node = this.state.selectedNode();
    if (!node) {
      this.lastKind = null;
      this.modules = [];
      this.root.replaceChildren();
      return;
    }
    if (node.kind !== this.lastKind) {
      this.lastKind = node.kind;
      this.modules = await this.client.listModules(node.kind);
      this.renderForms();
    }
  }

  private renderForms(): void {
    this.root.replaceChildren();
    for (const module of this.modules) {
      const form = document.createElement("form");
      form.setAttribute("data-module", module.name);
      const title = document.createElement("strong");
      title.textContent = `${module.name} (${module.phase})`;
      form.appendChild(title);
      for (const param of module.params) {
        const label = document.createElement("label");
        label.textContent = param.name;
        const input = document.createElement("input");
        input.name = param.name;
        input.setAttribute("data-param", param.name);
        if (param.type === "flag") {
          input.type = "checkbox";
          input.checked = Boolean(param.default);
        } else {
          input.type = "text";
          input.value = param.default === null ? "" : String(param.default);
        }
        label.appendChild(input);
        form.appendChild(label);
      }
      const run = document.createElement("button");
      run.type = "submit";
      run.textContent = "run";
      form.appendChild(run);
      form.addEventListener("submit", (event) => {
        event.preventDefault();
        void this.run(module, form);
      });
      this.root.appendChild(form);
    }
  }

  collectParams(module: ModuleDoc, form: HTMLFormElement): Record<string, unknown> {
    const params: Record<string, unknown> = {};
    for (const spec of module.params) {
      const input = form.querySelector<HTMLInputElement>(`[data-param="${spec.name}"]`);
      if (!input) continue;
      if (spec.type === "flag") params[spec.name] = input.checked;
      else if (spec.type === "int") params[spec.name] = parseInt(input.value || "0", 10);
      else params[spec.name] = input.value;
    }
    return params;
  }

  async run(module: ModuleDoc, form: HTMLFormElement): Promise<void> {
    const node = this.state.selectedNode();
    if (!node) return;
    this.toast.textContent = "";
    let jobId: string | null = null;
    try {
      const started = await this.client.startJob(
        module.name,
        node.id,
        this.collectParams(module, form),
      );
      jobId = started.job;
      this.state.jobStarted(jobId);
      const job = await this.client.waitForJob(jobId);
      if (job.state === "failed") {
        this.toast.textContent = `${module.name} failed: ${job.error ?? "unknown error"}`;
        return; // canvas untouched: no graph refresh needed, server unchanged
      }
      this.state.setGraph(await this.client.getGraph());
    } catch (err) {
      if (err instanceof ApiError) {
        this.toast.textContent = `${err.code}: ${err.message}`;
        return;
      }
      throw err;
    } finally {
      if (jobId) this.state.jobFinished(jobId);
    }
  }
}
