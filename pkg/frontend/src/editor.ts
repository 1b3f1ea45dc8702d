/** 2D plan editor: draws the sketch and turns pointer gestures into
 * session edits.  Left click places a vertex or endpoint for the active
 * tool; drag pans; the wheel zooms about the cursor.  Coordinates snap
 * to centimetres so exported files stay tidy. */

import type { UiSession } from "./state.js";
import type { Vec2 } from "./types.js";

const SNAP = 0.01; // m

export class PlanEditor {
  private scale = 40; // px per metre
  private cx = 8; // world coords at canvas centre
  private cy = 4;
  private dragFrom: { px: number; py: number; cx: number; cy: number } | null =
    null;
  private moved = false;

  constructor(
    private canvas: HTMLCanvasElement,
    private session: UiSession,
  ) {
    canvas.addEventListener("pointerdown", (e) => this.onDown(e));
    canvas.addEventListener("pointermove", (e) => this.onMove(e));
    canvas.addEventListener("pointerup", (e) => this.onUp(e));
    canvas.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
    session.onChange(() => this.render());
    new ResizeObserver(() => this.resize()).observe(canvas);
    this.resize();
  }

  private resize(): void {
    const dpr = window.devicePixelRatio || 1;
    const { clientWidth: w, clientHeight: h } = this.canvas;
    if (w === 0 || h === 0) return;
    this.canvas.width = Math.round(w * dpr);
    this.canvas.height = Math.round(h * dpr);
    this.render();
  }

  /** Frame the current sketch (or a default 16x8 m site). */
  fitView(): void {
    const pts: Vec2[] = [
      ...this.session.draft.boundary,
      ...this.session.draft.obstacles.flatMap((o) => o.polygon),
    ];
    if (this.session.draft.start) {
      pts.push([this.session.draft.start[0], this.session.draft.start[1]]);
    }
    if (this.session.draft.end) {
      pts.push([this.session.draft.end[0], this.session.draft.end[1]]);
    }
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;
    if (pts.length === 0) {
      this.cx = 8;
      this.cy = 4;
      this.scale = Math.min(w / 18, h / 10);
      this.render();
      return;
    }
    const xs = pts.map((p) => p[0]);
    const ys = pts.map((p) => p[1]);
    const x0 = Math.min(...xs);
    const x1 = Math.max(...xs);
    const y0 = Math.min(...ys);
    const y1 = Math.max(...ys);
    this.cx = (x0 + x1) / 2;
    this.cy = (y0 + y1) / 2;
    const span = Math.max(x1 - x0 + 2, y1 - y0 + 2, 4);
    this.scale = Math.min(w, h) / span;
    this.render();
  }

  private toWorld(e: PointerEvent | WheelEvent): Vec2 {
    const r = this.canvas.getBoundingClientRect();
    const px = e.clientX - r.left;
    const py = e.clientY - r.top;
    return [
      this.cx + (px - r.width / 2) / this.scale,
      this.cy - (py - r.height / 2) / this.scale,
    ];
  }

  private toScreen(x: number, y: number): Vec2 {
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;
    return [w / 2 + (x - this.cx) * this.scale, h / 2 - (y - this.cy) * this.scale];
  }

  private onDown(e: PointerEvent): void {
    this.canvas.setPointerCapture(e.pointerId);
    this.dragFrom = { px: e.clientX, py: e.clientY, cx: this.cx, cy: this.cy };
    this.moved = false;
  }

  private onMove(e: PointerEvent): void {
    if (!this.dragFrom) return;
    const dx = e.clientX - this.dragFrom.px;
    const dy = e.clientY - this.dragFrom.py;
    if (Math.abs(dx) + Math.abs(dy) > 4) this.moved = true;
    if (this.moved) {
      this.cx = this.dragFrom.cx - dx / this.scale;
      this.cy = this.dragFrom.cy + dy / this.scale;
      this.render();
    }
  }

  private onUp(e: PointerEvent): void {
    const wasDrag = this.moved;
    this.dragFrom = null;
    this.moved = false;
    if (wasDrag || e.button !== 0) return;
    const [wx, wy] = this.toWorld(e);
    const snap = (v: number) => {
      const s = Math.round(v / SNAP) * SNAP;
      const r = Number(s.toFixed(2));
      return r === 0 ? 0 : r;
    };
    this.session.placePoint(snap(wx), snap(wy));
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const [wx, wy] = this.toWorld(e);
    const factor = Math.exp(-e.deltaY / 400);
    this.scale = Math.min(400, Math.max(4, this.scale * factor));
    // keep the point under the cursor fixed
    const r = this.canvas.getBoundingClientRect();
    const px = e.clientX - r.left;
    const py = e.clientY - r.top;
    this.cx = wx - (px - r.width / 2) / this.scale;
    this.cy = wy + (py - r.height / 2) / this.scale;
    this.render();
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const dpr = window.devicePixelRatio || 1;
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#fafaf7";
    ctx.fillRect(0, 0, w, h);

    this.drawGrid(ctx, w, h);
    const d = this.session.draft;

    for (const o of d.obstacles) {
      this.drawPolygon(ctx, o.polygon, "rgba(160, 82, 45, 0.25)", "#8a5a3b", true);
    }
    if (this.session.obstacleTrace.length > 0) {
      this.drawPolygon(ctx, this.session.obstacleTrace, null, "#c07040", false, true);
    }
    if (d.boundary.length > 0) {
      this.drawPolygon(ctx, d.boundary, null, "#2f4f6f", d.boundary.length >= 3);
    }
    if (d.start) this.drawMarker(ctx, d.start[0], d.start[1], "#1a7f37", "S");
    if (d.end) this.drawMarker(ctx, d.end[0], d.end[1], "#b3261e", "E");
  }

  private drawGrid(ctx: CanvasRenderingContext2D, w: number, h: number): void {
    const x0 = this.cx - w / 2 / this.scale;
    const x1 = this.cx + w / 2 / this.scale;
    const y0 = this.cy - h / 2 / this.scale;
    const y1 = this.cy + h / 2 / this.scale;
    const step = this.scale > 25 ? 1 : 5;
    ctx.lineWidth = 1;
    for (let x = Math.ceil(x0 / step) * step; x <= x1; x += step) {
      const [sx] = this.toScreen(x, 0);
      ctx.strokeStyle = x % 5 === 0 ? "#d8d8d2" : "#ebebe6";
      ctx.beginPath();
      ctx.moveTo(sx, 0);
      ctx.lineTo(sx, h);
      ctx.stroke();
    }
    for (let y = Math.ceil(y0 / step) * step; y <= y1; y += step) {
      const [, sy] = this.toScreen(0, y);
      ctx.strokeStyle = y % 5 === 0 ? "#d8d8d2" : "#ebebe6";
      ctx.beginPath();
      ctx.moveTo(0, sy);
      ctx.lineTo(w, sy);
      ctx.stroke();
    }
  }

  private drawPolygon(
    ctx: CanvasRenderingContext2D,
    pts: Vec2[],
    fill: string | null,
    stroke: string,
    close: boolean,
    dashed = false,
  ): void {
    if (pts.length === 0) return;
    ctx.beginPath();
    const [fx, fy] = this.toScreen(pts[0][0], pts[0][1]);
    ctx.moveTo(fx, fy);
    for (const [x, y] of pts.slice(1)) {
      const [sx, sy] = this.toScreen(x, y);
      ctx.lineTo(sx, sy);
    }
    if (close) ctx.closePath();
    if (fill) {
      ctx.fillStyle = fill;
      ctx.fill();
    }
    ctx.strokeStyle = stroke;
    ctx.lineWidth = 2;
    ctx.setLineDash(dashed ? [6, 4] : []);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = stroke;
    for (const [x, y] of pts) {
      const [sx, sy] = this.toScreen(x, y);
      ctx.beginPath();
      ctx.arc(sx, sy, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  /** Endpoint marker: a circled X with a small label. */
  private drawMarker(
    ctx: CanvasRenderingContext2D,
    x: number,
    y: number,
    color: string,
    label: string,
  ): void {
    const [sx, sy] = this.toScreen(x, y);
    const r = 9;
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(sx, sy, r, 0, 2 * Math.PI);
    ctx.stroke();
    const d = r * Math.SQRT1_2;
    ctx.beginPath();
    ctx.moveTo(sx - d, sy - d);
    ctx.lineTo(sx + d, sy + d);
    ctx.moveTo(sx - d, sy + d);
    ctx.lineTo(sx + d, sy - d);
    ctx.stroke();
    ctx.fillStyle = color;
    ctx.font = "12px sans-serif";
    ctx.fillText(label, sx + r + 3, sy - r - 1);
  }
}
