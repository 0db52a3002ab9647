// View state and URL routing.  The URL is the source of truth: any
// viewer or benchmark URL reproduces the same rendered report when
// reloaded or shared.

import { isValidQuantity } from "./decimal.js";
import type {
  ComponentItem,
  ConsumerDoc,
  Report,
  ScenarioDoc,
  ScopeItem,
  SourceDoc,
} from "./types.js";
import { isComponent, isLink } from "./types.js";

export type Route =
  | { mode: "viewer"; ref: { kind: "id"; id: string } }
  | { mode: "viewer"; ref: { kind: "uri"; uri: string } }
  | { mode: "viewer"; ref: { kind: "data"; payload: string } }
  | { mode: "benchmark"; ids: string[] }
  | { mode: "empty" };

export function parseLocation(search: string): Route {
  const params = new URLSearchParams(search);
  const ids = params.get("ids");
  if (ids) {
    const parts = ids.split(",").map((part) => part.trim()).filter(Boolean);
    return { mode: "benchmark", ids: parts };
  }
  const data = params.get("data");
  if (data) return { mode: "viewer", ref: { kind: "data", payload: data } };
  const id = params.get("id");
  if (id) return { mode: "viewer", ref: { kind: "id", id } };
  const uri = params.get("uri");
  if (uri) return { mode: "viewer", ref: { kind: "uri", uri } };
  return { mode: "empty" };
}

export interface ViewState {
  route: Route;
  /** current, possibly edited document */
  scenario: ScenarioDoc | null;
  /** base URI for resolving relative links of `scenario` */
  base: string | null;
  edited: boolean;
  report: Report | null;
  /** latest compute request; stale responses are discarded */
  seq: number;
  expanded: Set<string>;
}

export function initialState(route: Route): ViewState {
  return {
    route,
    scenario: null,
    base: null,
    edited: false,
    report: null,
    seq: 0,
    expanded: new Set(),
  };
}

export function pathKey(path: number[]): string {
  return path.join(".");
}

// -- edits -------------------------------------------------------------------

function clone<T>(doc: T): T {
  return JSON.parse(JSON.stringify(doc)) as T;
}

function itemAt(doc: ScenarioDoc, path: [number, number]): ScopeItem {
  const [scopeIndex, itemIndex] = path;
  const scope = doc.scopes[scopeIndex];
  const item = scope?.list[itemIndex];
  if (!item) throw new Error(`no element at [${path.join(", ")}]`);
  return item;
}

/** Quantity of a component or link; throws on invalid input (the caller
 * validates first and never sends a request for invalid values). */
export function applyQuantityEdit(
  doc: ScenarioDoc,
  path: [number, number],
  quantity: string,
): ScenarioDoc {
  if (!isValidQuantity(quantity)) {
    throw new Error(`quantity must be a positive number, got "${quantity.trim()}"`);
  }
  const next = clone(doc);
  itemAt(next, path).quantity = quantity.trim();
  return next;
}

export function applySourceEdit(
  doc: ScenarioDoc,
  path: [number, number],
  source: SourceDoc,
): ScenarioDoc {
  const next = clone(doc);
  const item = itemAt(next, path);
  if (!isComponent(item)) throw new Error("not a component");
  if (!correspondenceOk(source, item.consumer)) {
    throw new Error(`source type ${source.type} has no matching consumption`);
  }
  item.source = clone(source);
  return next;
}

export function applyConsumerEdit(
  doc: ScenarioDoc,
  path: [number, number],
  consumer: ConsumerDoc | null,
): ScenarioDoc {
  const next = clone(doc);
  const item = itemAt(next, path);
  if (!isComponent(item)) throw new Error("not a component");
  if (consumer === null) {
    delete item.consumer;
    return next;
  }
  if (!correspondenceOk(item.source, consumer)) {
    throw new Error(`consumer has no consumption for ${item.source.type}`);
  }
  item.consumer = clone(consumer);
  return next;
}

/** The energy-type correspondence rule: no consumer, or the consumer
 * declares a consumption for the source's type. */
export function correspondenceOk(
  source: SourceDoc,
  consumer: ConsumerDoc | undefined | null,
): boolean {
  if (!consumer) return true;
  return Object.prototype.hasOwnProperty.call(consumer.consumptions, source.type);
}

export function componentAt(doc: ScenarioDoc, path: number[]): ComponentItem | null {
  if (path.length !== 2) return null; // edits address the root document only
  const item = doc.scopes[path[0]]?.list[path[1]];
  return item && isComponent(item) ? item : null;
}

export function linkAt(doc: ScenarioDoc, path: number[]): ScopeItem | null {
  if (path.length !== 2) return null;
  const item = doc.scopes[path[0]]?.list[path[1]];
  return item && isLink(item) ? item : null;
}
