// Typed client for the service API.  The UI performs no emission
// arithmetic itself: every total on screen comes from these calls.

import type {
  ApiErrorBody,
  BenchmarkResponse,
  Catalog,
  Report,
  ScenarioDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly body: ApiErrorBody;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.body = body;
  }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  const response = await fetch(input, init);
  const text = await response.text();
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch {
    throw new ApiError({
      status: response.status,
      code: "bad_response",
      message: `non-JSON response from ${input}`,
    });
  }
  if (!response.ok) {
    throw new ApiError(parsed as ApiErrorBody);
  }
  return parsed as T;
}

export function fetchScenario(id: string): Promise<ScenarioDoc> {
  return request<ScenarioDoc>(`/scenarios/${encodeURIComponent(id)}`);
}

export function fetchScenarioByUri(uri: string): Promise<ScenarioDoc> {
  return request<ScenarioDoc>(uri);
}

export function computeByUri(uri: string): Promise<Report> {
  return request<Report>(`/api/compute?uri=${encodeURIComponent(uri)}`);
}

export function computeInline(scenario: ScenarioDoc, base?: string): Promise<Report> {
  const body: Record<string, unknown> = { scenario };
  if (base) body.base = base;
  return request<Report>("/api/compute", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function fetchBenchmark(ids: string[]): Promise<BenchmarkResponse> {
  return request<BenchmarkResponse>(
    `/api/benchmark?ids=${encodeURIComponent(ids.join(","))}`,
  );
}

export function fetchCatalog(): Promise<Catalog> {
  return request<Catalog>("./catalog.json");
}
