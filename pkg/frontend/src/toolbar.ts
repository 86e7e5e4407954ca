/** Seed-entry toolbar: kind selector, value input, add button, running-jobs
 * badge, and the grouping toggle. New values become graph nodes via the API;
 * the canvas picks them up from the refreshed server snapshot.
 */

import { ApiError, ApiSurface } from "./client.js";
import type { AppState } from "./state.js";

const SEEDABLE_KINDS = [
  "person",
  "username",
  "email",
  "phone_number",
  "address",
  "domain",
  "organization",
];

export class Toolbar {
  readonly form: HTMLFormElement;
  private readonly error: HTMLElement;
  private readonly badge: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly state: AppState,
    private readonly client: ApiSurface,
  ) {
    this.form = document.createElement("form");
    this.form.setAttribute("data-testid", "seed-form");

    const kindSelect = document.createElement("select");
    kindSelect.name = "kind";
    for (const kind of SEEDABLE_KINDS) {
      const option = document.createElement("option");
      option.value = kind;
      option.textContent = kind;
      kindSelect.appendChild(option);
    }
    const valueInput = document.createElement("input");
    valueInput.name = "value";
    valueInput.placeholder = "new value (name, username, email, ...)";
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "add";

    this.error = document.createElement("span");
    this.error.setAttribute("data-testid", "seed-error");
    this.error.style.color = "#c00";

    this.badge = document.createElement("span");
    this.badge.setAttribute("data-testid", "jobs-badge");

    const groupToggle = document.createElement("input");
    groupToggle.type = "checkbox";
    groupToggle.setAttribute("data-testid", "grouping-toggle");
    groupToggle.addEventListener("change", () => state.setGrouping(groupToggle.checked));
    const groupLabel = document.createElement("label");
    groupLabel.append(groupToggle, " group crowded results");

    this.form.append(kindSelect, valueInput, submit, this.error);
    container.append(this.form, this.badge, groupLabel);

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit(kindSelect.value, valueInput.value);
    });
    state.subscribe(() => {
      this.badge.textContent = state.runningJobCount()
        ? `${state.runningJobCount()} job(s) running`
        : "";
    });
  }

  async submit(kind: string, value: string): Promise<void> {
    this.error.textContent = "";
    if (!value.trim()) {
      this.error.textContent = "value must not be empty";
      return; // no request leaves the browser
    }
    try {
      const result = await this.client.addNode(kind, value);
      this.state.setGraph(await this.client.getGraph());
      // select the node either way; an existing one just gets highlighted
      this.state.select(result.node.id);
    } catch (err) {
      if (err instanceof ApiError) {
        this.error.textContent = err.message;
        return;
      }
      throw err;
    }
  }
}
