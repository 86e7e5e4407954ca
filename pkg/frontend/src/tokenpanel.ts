/** Results panel below the graph: extracted tokens for the selected node in
 * exactly the server's order, plus wordlist generation and download.
 */

import { ApiError, ApiSurface } from "./client.js";
import type { AppState } from "./state.js";

export class TokenPanel {
  readonly root: HTMLElement;
  private readonly list: HTMLOListElement;
  private readonly exportButton: HTMLButtonElement;
  private readonly download: HTMLAnchorElement;
  private readonly message: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly state: AppState,
    private readonly client: ApiSurface,
  ) {
    this.root = document.createElement("section");
    this.root.setAttribute("data-testid", "token-panel");
    this.list = document.createElement("ol");
    this.list.setAttribute("data-testid", "token-list");
    this.exportButton = document.createElement("button");
    this.exportButton.textContent = "generate wordlist";
    this.exportButton.setAttribute("data-testid", "wordlist-export");
    this.download = document.createElement("a");
    this.download.setAttribute("data-testid", "wordlist-download");
    this.download.hidden = true;
    this.message = document.createElement("span");
    this.root.append(this.list, this.exportButton, this.download, this.message);
    container.appendChild(this.root);

    this.exportButton.addEventListener("click", () => void this.exportWordlist());
    state.subscribe(() => this.render());
    this.render();
  }

  tokens(): string[] {
    return this.state.selectedTokens();
  }

  render(): void {
    const tokens = this.tokens();
    this.list.replaceChildren(
      ...tokens.map((token) => {
        const item = document.createElement("li");
        item.textContent = token;
        return item;
      }),
    );
    this.exportButton.disabled = tokens.length === 0;
  }

  async exportWordlist(): Promise<void> {
    const node = this.state.selectedNode();
    if (!node || this.tokens().length === 0) return;
    this.message.textContent = "";
    try {
      const result = await this.client.createWordlist({ from_node: node.id });
      this.download.hidden = false;
      this.download.href = result.download_url;
      this.download.textContent = `download ${result.count} candidates`;
    } catch (err) {
      if (err instanceof ApiError) {
        this.message.textContent = `${err.code}: ${err.message}`;
        return;
      }
      throw err;
    }
  }
}
