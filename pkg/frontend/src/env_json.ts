/** Import/export of the CLI's environment JSON.
 *
 * Export writes the same canonical text the backend's own serializer
 * produces, so a file sketched here is accepted verbatim by
 * `rampgen generate --env` and an imported file re-exports
 * byte-identically.
 */

import { canonicalFloatJson, round9 } from "./pyjson.js";
import type { EnvDraft, ObstacleDraft, Vec2, Vec3 } from "./types.js";

export function emptyDraft(): EnvDraft {
  return { boundary: [], obstacles: [], start: null, end: null, ground_z: 0 };
}

export function exportEnvText(draft: EnvDraft): string {
  if (draft.start === null || draft.end === null) {
    throw new Error("cannot export before both endpoints are placed");
  }
  const doc = {
    boundary: draft.boundary.map(([x, y]) => [round9(x), round9(y)]),
    end: draft.end.map(round9),
    ground_z: round9(draft.ground_z),
    obstacles: draft.obstacles.map((o) => ({
      base_z: round9(o.base_z),
      polygon: o.polygon.map(([x, y]) => [round9(x), round9(y)]),
      top_z: round9(o.top_z),
    })),
    start: draft.start.map(round9),
  };
  return canonicalFloatJson(doc);
}

/** The JSON value the generate request carries; same numbers as the
 * exported file, so the service parses identical coordinates. */
export function exportEnvDoc(draft: EnvDraft): unknown {
  return JSON.parse(exportEnvText(draft));
}

export function importEnvText(text: string): EnvDraft {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (exc) {
    throw new Error(`environment is not valid JSON: ${String(exc)}`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error("environment must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;

  const boundary = readPoints(doc.boundary, "boundary", 2) as Vec2[];
  if (boundary.length < 3) throw new Error("boundary needs at least 3 vertices");

  const obstacles: ObstacleDraft[] = [];
  const rawObs = doc.obstacles ?? [];
  if (!Array.isArray(rawObs)) throw new Error("obstacles must be an array");
  rawObs.forEach((entry, idx) => {
    if (typeof entry !== "object" || entry === null) {
      throw new Error(`obstacle ${idx} must be an object`);
    }
    const o = entry as Record<string, unknown>;
    obstacles.push({
      polygon: readPoints(o.polygon, `obstacle ${idx} polygon`, 2) as Vec2[],
      base_z: readNumber(o.base_z, `obstacle ${idx} base_z`),
      top_z: readNumber(o.top_z, `obstacle ${idx} top_z`),
    });
  });

  return {
    boundary,
    obstacles,
    start: readPoint3(doc.start, "start"),
    end: readPoint3(doc.end, "end"),
    ground_z: doc.ground_z === undefined ? 0 : readNumber(doc.ground_z, "ground_z"),
  };
}

function readNumber(v: unknown, label: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new Error(`${label} must be a finite number`);
  }
  return v;
}

function readPoints(v: unknown, label: string, dim: number): number[][] {
  if (!Array.isArray(v)) throw new Error(`${label} must be an array of points`);
  return v.map((p, i) => {
    if (!Array.isArray(p) || p.length < dim) {
      throw new Error(`${label}[${i}] must be a ${dim}-number point`);
    }
    return p.slice(0, dim).map((c, k) => readNumber(c, `${label}[${i}][${k}]`));
  });
}

function readPoint3(v: unknown, label: string): Vec3 {
  if (!Array.isArray(v) || v.length !== 3) {
    throw new Error(`${label} must be an [x, y, z] triple`);
  }
  return [
    readNumber(v[0], `${label}[0]`),
    readNumber(v[1], `${label}[1]`),
    readNumber(v[2], `${label}[2]`),
  ];
}
