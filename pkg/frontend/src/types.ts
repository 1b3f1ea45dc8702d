/** Shared shapes for the service payloads and the plan draft. */

export type Vec2 = [number, number];
export type Vec3 = [number, number, number];

export interface ObstacleDraft {
  polygon: Vec2[];
  base_z: number;
  top_z: number;
}

/** The environment being sketched; null endpoints are not yet placed. */
export interface EnvDraft {
  boundary: Vec2[];
  obstacles: ObstacleDraft[];
  start: Vec3 | null;
  end: Vec3 | null;
  ground_z: number;
}

/** `GET /api/defaults` */
export interface DefaultsDoc {
  params: ParamsDoc;
  rules: RulesDoc;
}

export interface ParamsDoc {
  search: Record<string, unknown>;
  geom: Record<string, unknown> & {
    railing: Record<string, unknown>;
    supports: Record<string, unknown>;
  };
  grid: Record<string, unknown>;
}

export interface RulesDoc {
  max_slope: number;
  max_cross_slope: number;
  min_width: number;
  max_rise_per_run: number;
  min_landing_length: number;
  handrail_height: [number, number];
  min_clearance: number;
  source: string;
}

/** One row of the compliance table inside a report. */
export interface RuleRow {
  rule: string;
  description: string;
  limit: unknown;
  measured: unknown;
  passed: boolean;
  detail: string;
}

export interface SlopeCandidate {
  slope: number;
  feasible: boolean;
  length: number | null;
  landings: number | null;
  source: string | null;
  score: number | null;
}

/** The report document; only the members the panels read are typed. */
export interface ReportDoc {
  stage_score: number;
  status: string;
  error: string | null;
  compliance: { passed: boolean; rules: RuleRow[]; notes: string[] } | null;
  search?: {
    chosen_slope: number | null;
    candidates: SlopeCandidate[];
    source: string | null;
  };
  path?: { length: number; rise: number; slope: number };
  model?: { vertices: number; triangles: number; solids: number };
  [key: string]: unknown;
}

export interface SolidDoc {
  name: string;
  material: string;
  vertices: number[][];
  triangles: number[][];
}

export interface ModelDoc {
  schema: string;
  solids: SolidDoc[];
  counts: { vertices: number; triangles: number };
}

/** Fill colours for the viewer, matching the MTL table the CLI writes. */
export const MATERIAL_COLORS: Record<string, [number, number, number]> = {
  concrete: [0.68, 0.66, 0.62],
  steel: [0.56, 0.57, 0.6],
  wood: [0.55, 0.38, 0.21],
  glass: [0.62, 0.78, 0.82],
};
export const FALLBACK_COLOR: [number, number, number] = [0.7, 0.7, 0.7];

export const RAILING_TYPES = ["single-square", "single-rounded", "double-rounded"];
export const PATH_TYPES = ["straight", "curve"];
export const LANDING_MODES = ["automatic", "manual"];
export const MATERIALS = Object.keys(MATERIAL_COLORS);
