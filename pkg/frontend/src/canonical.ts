// Canonical JSON for scenario documents: the byte format used for
// downloads and ?data= share payloads.  Must match the service's
// canonical serializer exactly: reference field order, numeric fields
// as strings, compact separators, unknown fields after known ones in
// their original order.

import type { RateEntry, ScenarioDoc, ScopeItem } from "./types.js";

const SCENARIO_KEYS = ["title", "reference_url", "scopes"];
const SCOPE_KEYS = ["level", "description", "list"];
const COMPONENT_KEYS = ["type", "consumer", "quantity", "quantity_unit", "category", "source"];
const LINK_KEYS = ["type", "uri", "quantity"];
const SOURCE_KEYS = ["name", "type", "description", "emissions"];
const CONSUMER_KEYS = ["name", "description", "consumptions"];
const RATE_KEYS = ["value", "unit", "base unit", "reference_url"];

type Json = string | number | boolean | null | Json[] | { [key: string]: Json };

function emit(value: Json): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(emit).join(",") + "]";
  }
  return (
    "{" +
    Object.entries(value)
      .map(([key, entry]) => JSON.stringify(key) + ":" + emit(entry as Json))
      .join(",") +
    "}"
  );
}

function numeric(value: string | number): string {
  return typeof value === "number" ? String(value) : value;
}

function ordered(
  source: Record<string, unknown>,
  known: string[],
  build: (key: string, value: unknown) => Json | undefined,
): Record<string, Json> {
  const out: Record<string, Json> = {};
  for (const key of known) {
    if (key in source && source[key] !== undefined) {
      const built = build(key, source[key]);
      if (built !== undefined) out[key] = built;
    }
  }
  for (const [key, value] of Object.entries(source)) {
    if (!known.includes(key) && value !== undefined) out[key] = value as Json;
  }
  return out;
}

function rateObj(entry: RateEntry): Record<string, Json> {
  return ordered(entry, RATE_KEYS, (key, value) =>
    key === "value" ? numeric(value as string | number) : (value as Json),
  );
}

function rateMap(map: Record<string, RateEntry>): Record<string, Json> {
  const out: Record<string, Json> = {};
  for (const [key, entry] of Object.entries(map)) out[key] = rateObj(entry);
  return out;
}

function itemObj(item: ScopeItem): Record<string, Json> {
  if (item.type === "link") {
    return ordered(item, LINK_KEYS, (key, value) =>
      key === "quantity" ? numeric(value as string | number) : (value as Json),
    );
  }
  return ordered(item, COMPONENT_KEYS, (key, value) => {
    if (key === "quantity") return numeric(value as string | number);
    if (key === "consumer") {
      return ordered(value as Record<string, unknown>, CONSUMER_KEYS, (k, v) =>
        k === "consumptions" ? rateMap(v as Record<string, RateEntry>) : (v as Json),
      );
    }
    if (key === "source") {
      return ordered(value as Record<string, unknown>, SOURCE_KEYS, (k, v) =>
        k === "emissions" ? rateMap(v as Record<string, RateEntry>) : (v as Json),
      );
    }
    return value as Json;
  });
}

export function canonicalScenario(doc: ScenarioDoc): string {
  const obj = ordered(doc, SCENARIO_KEYS, (key, value) => {
    if (key === "scopes") {
      return (value as ScenarioDoc["scopes"]).map((scope) =>
        ordered(scope, SCOPE_KEYS, (k, v) =>
          k === "list" ? (v as ScopeItem[]).map(itemObj) : (v as Json),
        ),
      );
    }
    return value as Json;
  });
  return emit(obj);
}
