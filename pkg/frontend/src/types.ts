/** Wire types for the idrecon HTTP API. */

export interface ProvenanceDoc {
  origin: string;
  module: string | null;
  job: string | null;
  source_category: string | null;
}

export interface NodeDoc {
  id: string;
  kind: string;
  value: string;
  label: string;
  provenance: ProvenanceDoc;
  created_at: string;
}

export interface EdgeDoc {
  id: string;
  from: string;
  to: string;
  label: string;
  job: string | null;
}

export interface GraphDoc {
  version: number;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface ParamSpec {
  name: string;
  type: "text" | "int" | "flag";
  default: unknown;
}

export interface ModuleDoc {
  name: string;
  phase: string;
  input_kinds: string[];
  output_kinds: string[];
  produces_files?: boolean;
  network_access?: string;
  params: ParamSpec[];
}

export type JobStateName = "pending" | "running" | "succeeded" | "failed";

export interface JobDoc {
  id: string;
  module: string;
  node: string;
  params: Record<string, unknown>;
  state: JobStateName;
  error: string | null;
  started_at: string | null;
  finished_at: string | null;
  nodes: string[];
  edges: string[];
  files: string[];
}

export interface ProjectDoc {
  name: string;
  created_at: string;
  schema_version: number;
  nodes: number;
  edges: number;
}

export interface AddNodeResult {
  node: NodeDoc;
  created: boolean;
}

export interface StartJobResult {
  job: string;
  state: string;
}

export interface WordlistConfigBody {
  case?: string[];
  leet?: boolean;
  suffixes?: string[];
  year_from?: number;
  year_to?: number;
  depth?: number;
  max?: number;
}

export interface WordlistResult {
  count: number;
  download_url: string;
  fingerprint: string;
}

export interface TransportBody {
  mode: "live" | "record" | "replay";
  fixture?: string;
}

export const emptyGraph = (): GraphDoc => ({ version: 1, nodes: [], edges: [] });
