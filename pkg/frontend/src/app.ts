/** Application shell: top toolbar, central graph canvas, results below —
 * wired so every user action round-trips through the HTTP API.
 */

import { ApiClient, ApiSurface } from "./client.js";
import { GraphCanvas } from "./canvas.js";
import { ModuleMenu } from "./modulemenu.js";
import { AppState } from "./state.js";
import { TokenPanel } from "./tokenpanel.js";
import { Toolbar } from "./toolbar.js";

export interface App {
  state: AppState;
  toolbar: Toolbar;
  canvas: GraphCanvas;
  menu: ModuleMenu;
  panel: TokenPanel;
  refresh: () => Promise<void>;
}

export async function mountApp(root: HTMLElement, client: ApiSurface): Promise<App> {
  const state = new AppState();

  const top = document.createElement("header");
  const middle = document.createElement("main");
  const side = document.createElement("aside");
  const bottom = document.createElement("footer");
  root.append(top, middle, side, bottom);

  const toolbar = new Toolbar(top, state, client);
  const canvas = new GraphCanvas(middle, state, 900, 600);
  const menu = new ModuleMenu(side, state, client);
  const panel = new TokenPanel(bottom, state, client);

  const refresh = async () => {
    state.setGraph(await client.getGraph());
  };
  await refresh();
  return { state, toolbar, canvas, menu, panel, refresh };
}

export function bootstrap(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  void mountApp(root, new ApiClient(""));
}
