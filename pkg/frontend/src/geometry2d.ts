/** Plan-editor validation predicates.
 *
 * These mirror the service's environment checks (same orientation tests,
 * same epsilon) so the editor flags exactly the sketches the service
 * would reject -- but the service remains the authority: every sketch
 * still goes through it unchanged.
 */

import type { Vec2 } from "./types.js";

const AREA_EPS = 1e-12;

export function polygonArea(poly: Vec2[]): number {
  let area = 0;
  for (let i = 0; i < poly.length; i += 1) {
    const [x0, y0] = poly[i];
    const [x1, y1] = poly[(i + 1) % poly.length];
    area += x0 * y1 - x1 * y0;
  }
  return 0.5 * area;
}

function orient(p: Vec2, q: Vec2, r: Vec2): number {
  return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
}

function onSegment(p: Vec2, q: Vec2, r: Vec2): boolean {
  return (
    Math.min(p[0], q[0]) - AREA_EPS <= r[0] &&
    r[0] <= Math.max(p[0], q[0]) + AREA_EPS &&
    Math.min(p[1], q[1]) - AREA_EPS <= r[1] &&
    r[1] <= Math.max(p[1], q[1]) + AREA_EPS
  );
}

export function segmentsIntersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2): boolean {
  const o1 = orient(a, b, c);
  const o2 = orient(a, b, d);
  const o3 = orient(c, d, a);
  const o4 = orient(c, d, b);
  if (
    (o1 > 0) !== (o2 > 0) &&
    (o3 > 0) !== (o4 > 0) &&
    o1 !== 0 &&
    o2 !== 0 &&
    o3 !== 0 &&
    o4 !== 0
  ) {
    return true;
  }
  if (o1 === 0 && onSegment(a, b, c)) return true;
  if (o2 === 0 && onSegment(a, b, d)) return true;
  if (o3 === 0 && onSegment(c, d, a)) return true;
  if (o4 === 0 && onSegment(c, d, b)) return true;
  return false;
}

/** >= 3 vertices, nonzero area, and no non-adjacent edge crossings. */
export function isSimplePolygon(poly: Vec2[]): boolean {
  const n = poly.length;
  if (n < 3) return false;
  if (Math.abs(polygonArea(poly)) < AREA_EPS) return false;
  const edges: [Vec2, Vec2][] = [];
  for (let i = 0; i < n; i += 1) {
    edges.push([poly[i], poly[(i + 1) % n]]);
  }
  for (let i = 0; i < n; i += 1) {
    const [a, b] = edges[i];
    if (a[0] === b[0] && a[1] === b[1]) return false;
    for (let j = i + 1; j < n; j += 1) {
      if (j === i || (j + 1) % n === i || (i + 1) % n === j) continue;
      const [c, d] = edges[j];
      if (segmentsIntersect(a, b, c, d)) return false;
    }
  }
  return true;
}

/** Even-odd ray casting. */
export function pointInPolygon(x: number, y: number, poly: Vec2[]): boolean {
  let inside = false;
  const n = poly.length;
  let j = n - 1;
  for (let i = 0; i < n; i += 1) {
    const [xi, yi] = poly[i];
    const [xj, yj] = poly[j];
    if (yi > y !== yj > y) {
      const xAt = ((xj - xi) * (y - yi)) / (yj - yi) + xi;
      if (x < xAt) inside = !inside;
    }
    j = i;
  }
  return inside;
}
