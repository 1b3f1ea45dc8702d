/** The single mutable store behind the UI.
 *
 * Everything user-visible is derived from this object: the plan draft,
 * the parameter overrides, the last service response, and the dirty
 * flag that marks results as stale after further edits.  The store
 * enforces the interaction rules -- generation is gated until the
 * sketch is valid, only one request may be in flight, and every edit is
 * undoable -- while leaving all ramp mathematics to the service.
 */

import { isSimplePolygon, pointInPolygon } from "./geometry2d.js";
import { emptyDraft, importEnvText } from "./env_json.js";
import type { EnvDraft, ModelDoc, ReportDoc, Vec2 } from "./types.js";

export type Tool = "boundary" | "obstacle" | "start" | "end";

export type RequestPhase =
  | { kind: "idle" }
  | { kind: "pending" }
  | {
      kind: "done";
      status: number; // 200 | 400 | 422
      report: ReportDoc | null;
      model: ModelDoc | null;
      error: string | null;
      reportText: string | null; // canonical bytes for download/parity
    }
  | { kind: "network-error"; message: string };

export type ParamOverrides = { [key: string]: unknown };

const UNDO_LIMIT = 200;

export class UiSession {
  draft: EnvDraft = emptyDraft();
  /** vertices of the obstacle currently being traced, if any */
  obstacleTrace: Vec2[] = [];
  tool: Tool = "boundary";
  params: ParamOverrides = {};
  request: RequestPhase = { kind: "idle" };
  dirty = false;

  private undoStack: string[] = [];
  private listeners: (() => void)[] = [];

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  private snapshot(): void {
    this.undoStack.push(
      JSON.stringify({ draft: this.draft, trace: this.obstacleTrace }),
    );
    if (this.undoStack.length > UNDO_LIMIT) this.undoStack.shift();
  }

  private touched(): void {
    this.dirty = true;
    this.emit();
  }

  // -- plan editing ---------------------------------------------------------

  placePoint(x: number, y: number): void {
    this.snapshot();
    if (this.tool === "boundary") {
      this.draft.boundary.push([x, y]);
    } else if (this.tool === "obstacle") {
      this.obstacleTrace.push([x, y]);
    } else if (this.tool === "start") {
      this.draft.start = [x, y, this.draft.start ? this.draft.start[2] : 0];
    } else {
      this.draft.end = [x, y, this.draft.end ? this.draft.end[2] : 0];
    }
    this.touched();
  }

  setEndpointHeight(which: "start" | "end", z: number): void {
    const pt = this.draft[which];
    if (!pt) return;
    this.snapshot();
    pt[2] = z;
    this.touched();
  }

  setGroundZ(z: number): void {
    this.snapshot();
    this.draft.ground_z = z;
    this.touched();
  }

  /** Commit the traced obstacle outline with its height band. */
  closeObstacle(baseZ: number, topZ: number): string | null {
    if (this.obstacleTrace.length < 3) {
      return "an obstacle needs at least 3 vertices";
    }
    if (!isSimplePolygon(this.obstacleTrace)) {
      return "obstacle polygon is degenerate or self-intersecting";
    }
    if (topZ <= baseZ) {
      return "obstacle top_z must exceed base_z";
    }
    this.snapshot();
    this.draft.obstacles.push({
      polygon: this.obstacleTrace,
      base_z: baseZ,
      top_z: topZ,
    });
    this.obstacleTrace = [];
    this.touched();
    return null;
  }

  undo(): void {
    const prev = this.undoStack.pop();
    if (prev === undefined) return;
    const doc = JSON.parse(prev) as { draft: EnvDraft; trace: Vec2[] };
    this.draft = doc.draft;
    this.obstacleTrace = doc.trace;
    this.touched();
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  clearPlan(): void {
    this.snapshot();
    this.draft = emptyDraft();
    this.obstacleTrace = [];
    this.touched();
  }

  importEnv(text: string): string | null {
    let draft: EnvDraft;
    try {
      draft = importEnvText(text);
    } catch (exc) {
      return exc instanceof Error ? exc.message : String(exc);
    }
    this.snapshot();
    this.draft = draft;
    this.obstacleTrace = [];
    this.touched();
    return null;
  }

  // -- validation -----------------------------------------------------------

  /** Inline sketch problems, mirroring the service's own error wording.
   * Empty iff the sketch would pass environment parsing. */
  validationErrors(): string[] {
    const out: string[] = [];
    const d = this.draft;
    if (d.boundary.length < 3) {
      out.push("boundary needs at least 3 vertices");
    } else if (!isSimplePolygon(d.boundary)) {
      out.push("boundary must be a simple polygon with nonzero area");
    }
    d.obstacles.forEach((o, idx) => {
      if (!isSimplePolygon(o.polygon)) {
        out.push(`obstacle ${idx} polygon is degenerate or self-intersecting`);
      }
      if (o.top_z <= o.base_z) {
        out.push(`obstacle ${idx}: top_z must exceed base_z`);
      }
    });
    if (d.start === null) out.push("start point is not placed");
    if (d.end === null) out.push("end point is not placed");
    if (d.boundary.length >= 3 && isSimplePolygon(d.boundary)) {
      for (const [label, pt] of [
        ["start", d.start],
        ["end", d.end],
      ] as const) {
        if (!pt) continue;
        if (!pointInPolygon(pt[0], pt[1], d.boundary)) {
          out.push(`${label} point (${pt[0]}, ${pt[1]}) is outside the boundary`);
        }
        d.obstacles.forEach((o, idx) => {
          if (pointInPolygon(pt[0], pt[1], o.polygon)) {
            out.push(`${label} point (${pt[0]}, ${pt[1]}) lies inside obstacle ${idx}`);
          }
        });
      }
    }
    return out;
  }

  canGenerate(): boolean {
    return this.request.kind !== "pending" && this.validationErrors().length === 0;
  }

  // -- parameters -----------------------------------------------------------

  /** Record an override at a dotted path like "geom.railing.height";
   * the overrides object mirrors the service's nested params shape. */
  setParam(path: string, value: unknown): void {
    const keys = path.split(".");
    let node = this.params;
    for (const k of keys.slice(0, -1)) {
      if (typeof node[k] !== "object" || node[k] === null) node[k] = {};
      node = node[k] as ParamOverrides;
    }
    node[keys[keys.length - 1]] = value;
    this.touched();
  }

  clearParam(path: string): void {
    const keys = path.split(".");
    const chain: ParamOverrides[] = [this.params];
    for (const k of keys.slice(0, -1)) {
      const next = chain[chain.length - 1][k];
      if (typeof next !== "object" || next === null) return;
      chain.push(next as ParamOverrides);
    }
    delete chain[chain.length - 1][keys[keys.length - 1]];
    for (let i = chain.length - 1; i > 0; i -= 1) {
      if (Object.keys(chain[i]).length === 0) delete chain[i - 1][keys[i - 1]];
    }
    this.touched();
  }

  // -- request lifecycle ----------------------------------------------------

  beginRequest(): boolean {
    if (this.request.kind === "pending") return false;
    this.request = { kind: "pending" };
    this.emit();
    return true;
  }

  completeRequest(
    status: number,
    report: ReportDoc | null,
    model: ModelDoc | null,
    error: string | null,
    reportText: string | null,
  ): void {
    this.request = { kind: "done", status, report, model, error, reportText };
    this.dirty = false;
    this.emit();
  }

  failRequest(message: string): void {
    this.request = { kind: "network-error", message };
    this.emit();
  }
}
