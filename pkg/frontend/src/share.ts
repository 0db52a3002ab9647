// URL-safe scenario payloads: unpadded base64url over the canonical
// JSON bytes, matching the service's codec bit for bit.

import { canonicalScenario } from "./canonical.js";
import type { ScenarioDoc } from "./types.js";

export const WARN_URL_LENGTH = 2000;
export const MAX_URL_LENGTH = 8000;

export function encodePayload(doc: ScenarioDoc): string {
  const bytes = new TextEncoder().encode(canonicalScenario(doc));
  let binary = "";
  for (let i = 0; i < bytes.length; i += 0x8000) {
    binary += String.fromCharCode(...bytes.subarray(i, i + 0x8000));
  }
  return btoa(binary).replace(/\+/g, "-").replace(/\//g, "_").replace(/=+$/, "");
}

export function decodePayload(payload: string): ScenarioDoc {
  if (!/^[A-Za-z0-9_-]+$/.test(payload)) {
    throw new Error("payload is not valid base64url");
  }
  const base64 = payload.replace(/-/g, "+").replace(/_/g, "/");
  const padded = base64 + "=".repeat((4 - (base64.length % 4)) % 4);
  const binary = atob(padded);
  const bytes = Uint8Array.from(binary, (char) => char.charCodeAt(0));
  const text = new TextDecoder("utf-8", { fatal: true }).decode(bytes);
  const doc = JSON.parse(text) as ScenarioDoc;
  if (typeof doc !== "object" || doc === null || !("title" in doc) || !("scopes" in doc)) {
    throw new Error("payload does not decode to a scenario document");
  }
  return doc;
}

export type ShareSize = "ok" | "long" | "too-large";

export function buildShareUrl(base: string, payload: string): { url: string; size: ShareSize } {
  const separator = base.includes("?") ? "&" : "?";
  const url = `${base}${separator}data=${payload}`;
  const size: ShareSize =
    url.length > MAX_URL_LENGTH ? "too-large" : url.length > WARN_URL_LENGTH ? "long" : "ok";
  return { url, size };
}

export function buildIdUrl(base: string, id: string): string {
  const separator = base.includes("?") ? "&" : "?";
  return `${base}${separator}id=${encodeURIComponent(id)}`;
}
