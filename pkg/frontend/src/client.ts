/** Typed client for the idrecon API; the only way the UI touches the server. */

import type {
  AddNodeResult,
  GraphDoc,
  JobDoc,
  ModuleDoc,
  ProjectDoc,
  StartJobResult,
  TransportBody,
  WordlistConfigBody,
  WordlistResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiSurface {
  getProject(): Promise<ProjectDoc>;
  getGraph(): Promise<GraphDoc>;
  addNode(kind: string, value: string, label?: string): Promise<AddNodeResult>;
  addEdge(from: string, to: string, label: string): Promise<{ id: string }>;
  listModules(inputKind?: string): Promise<ModuleDoc[]>;
  startJob(
    module: string,
    node: string,
    params?: Record<string, unknown>,
    transport?: TransportBody,
  ): Promise<StartJobResult>;
  getJob(id: string): Promise<JobDoc>;
  waitForJob(id: string, pollMs?: number): Promise<JobDoc>;
  createWordlist(
    source: { tokens?: string[]; from_node?: string },
    config?: WordlistConfigBody,
  ): Promise<WordlistResult>;
  fileUrl(relpath: string): string;
}

export class ApiClient implements ApiSurface {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "HttpError";
      let message = `${response.status} on ${path}`;
      try {
        const parsed = (await response.json()) as { code?: string; message?: string };
        if (parsed.code) code = parsed.code;
        if (parsed.message) message = parsed.message;
      } catch {
        // non-JSON error body; keep the fallback message
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  getProject(): Promise<ProjectDoc> {
    return this.request("GET", "/api/project");
  }

  getGraph(): Promise<GraphDoc> {
    return this.request("GET", "/api/graph");
  }

  addNode(kind: string, value: string, label?: string): Promise<AddNodeResult> {
    return this.request("POST", "/api/nodes", { kind, value, label: label ?? null });
  }

  addEdge(from: string, to: string, label: string): Promise<{ id: string }> {
    return this.request("POST", "/api/edges", { from, to, label });
  }

  async listModules(inputKind?: string): Promise<ModuleDoc[]> {
    const query = inputKind ? `?input_kind=${encodeURIComponent(inputKind)}` : "";
    const body = await this.request<{ modules: ModuleDoc[] }>("GET", `/api/modules${query}`);
    return body.modules;
  }

  startJob(
    module: string,
    node: string,
    params: Record<string, unknown> = {},
    transport?: TransportBody,
  ): Promise<StartJobResult> {
    return this.request("POST", "/api/jobs", { module, node, params, transport });
  }

  getJob(id: string): Promise<JobDoc> {
    return this.request("GET", `/api/jobs/${encodeURIComponent(id)}`);
  }

  /** Poll until the job reaches a terminal state (the documented fallback
   * for clients without an EventSource). */
  async waitForJob(id: string, pollMs = 50): Promise<JobDoc> {
    for (;;) {
      const job = await this.getJob(id);
      if (job.state === "succeeded" || job.state === "failed") return job;
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  createWordlist(
    source: { tokens?: string[]; from_node?: string },
    config: WordlistConfigBody = {},
  ): Promise<WordlistResult> {
    return this.request("POST", "/api/wordlists", { ...source, config });
  }

  fileUrl(relpath: string): string {
    return `${this.baseUrl}/api/files/${relpath}`;
  }
}
