/** Thin fetch wrappers for the two service endpoints.  The raw response
 * text is kept alongside the parsed document so the report can be
 * re-emitted byte-exactly (see pyjson.memberAsCanonicalText). */

import type { DefaultsDoc } from "./types.js";

export interface GenerateOutcome {
  status: number;
  text: string;
  doc: Record<string, unknown>;
}

export async function fetchDefaults(base = ""): Promise<DefaultsDoc> {
  const res = await fetch(`${base}/api/defaults`);
  if (!res.ok) throw new Error(`defaults unavailable: HTTP ${res.status}`);
  return (await res.json()) as DefaultsDoc;
}

export async function postGenerate(
  environment: unknown,
  params: unknown,
  base = "",
): Promise<GenerateOutcome> {
  const res = await fetch(`${base}/api/generate`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ environment, params }),
  });
  const text = await res.text();
  let doc: Record<string, unknown> = {};
  try {
    doc = JSON.parse(text) as Record<string, unknown>;
  } catch {
    throw new Error(`service returned non-JSON (HTTP ${res.status})`);
  }
  return { status: res.status, text, doc };
}
