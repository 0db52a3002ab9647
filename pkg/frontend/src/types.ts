// Wire shapes shared with the backend: scenario documents as hosted,
// emission reports as returned by /api/compute, and the API error body.

export interface RateEntry {
  value: string | number;
  unit: string;
  "base unit": string;
  reference_url?: string;
  [extra: string]: unknown;
}

export interface SourceDoc {
  name: string;
  type: string;
  description?: string;
  emissions: Record<string, RateEntry>;
  [extra: string]: unknown;
}

export interface ConsumerDoc {
  name: string;
  description?: string;
  consumptions: Record<string, RateEntry>;
  [extra: string]: unknown;
}

export interface ComponentItem {
  type: "component";
  consumer?: ConsumerDoc;
  quantity: string | number;
  quantity_unit: string;
  category?: string;
  source: SourceDoc;
  [extra: string]: unknown;
}

export interface LinkItem {
  type: "link";
  uri: string;
  quantity?: string | number;
  [extra: string]: unknown;
}

export type ScopeItem = ComponentItem | LinkItem;

export interface ScopeDoc {
  level: string;
  description?: string;
  list: ScopeItem[];
  [extra: string]: unknown;
}

export interface ScenarioDoc {
  title: string;
  reference_url?: string;
  scopes: ScopeDoc[];
  [extra: string]: unknown;
}

export interface ElementNode {
  path: number[];
  kind: "component" | "link";
  label: string;
  per_key: Record<string, string>;
  children: ElementNode[];
}

export interface Report {
  scenario_uri: string;
  title: string;
  per_scope: Record<string, Record<string, string>>;
  grand_total: Record<string, string>;
  common_keys: string[];
  elements: ElementNode[];
  warnings: string[];
}

export interface BenchmarkFailure {
  index: number;
  uri: string;
  error: string;
}

export interface BenchmarkResponse {
  scenarios: Report[];
  common_keys: string[];
  table: Record<string, string[]>;
  ratios: Record<string, string[]>;
  failures: BenchmarkFailure[];
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
  detail?: Record<string, unknown>;
}

export interface Catalog {
  sources: SourceDoc[];
  consumers: ConsumerDoc[];
}

export function isComponent(item: ScopeItem): item is ComponentItem {
  return item.type === "component";
}

export function isLink(item: ScopeItem): item is LinkItem {
  return item.type === "link";
}
