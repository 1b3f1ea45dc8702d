/** Report panel: stage score, rule table, slope sweep chart, and the
 * failure banners.  Every number shown here is read straight out of the
 * service response; nothing is recomputed. */

import type { RequestPhase } from "./state.js";
import type { ReportDoc, SlopeCandidate } from "./types.js";

function el(tag: string, cls: string | null, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmtNumber(v: unknown): string {
  if (typeof v !== "number") {
    if (Array.isArray(v)) return v.map(fmtNumber).join(" … ");
    return v === null || v === undefined ? "–" : String(v);
  }
  if (Number.isInteger(v)) return String(v);
  return Math.abs(v) < 0.01 && v !== 0 ? v.toExponential(2) : v.toFixed(4);
}

function slopeLabel(s: number): string {
  return s > 0 ? `1:${(1 / s).toFixed(0)}` : "0";
}

export function renderReport(
  container: HTMLElement,
  phase: RequestPhase,
  dirty: boolean,
  onDownload: (() => void) | null,
): void {
  container.textContent = "";

  if (phase.kind === "idle") {
    container.append(
      el("p", "hint", "Sketch a site and generate to see the compliance report."),
    );
    return;
  }
  if (phase.kind === "pending") {
    container.append(el("p", "banner pending", "Generating…"));
    return;
  }
  if (phase.kind === "network-error") {
    container.append(
      el("p", "banner network-error", `Service unreachable: ${phase.message}`),
    );
    return;
  }

  if (dirty) {
    container.append(
      el("p", "banner stale", "The sketch changed since this result — regenerate."),
    );
  }

  if (phase.status === 400) {
    container.append(
      el("p", "banner invalid", `Invalid request: ${phase.error ?? "rejected"}`),
    );
  } else if (phase.status === 422) {
    container.append(
      el("p", "banner infeasible", `No compliant ramp: ${phase.error ?? "infeasible"}`),
    );
  }

  const report = phase.report;
  if (!report) return;

  const head = el("div", "score-row");
  const score = el("span", `score score-${report.stage_score}`, String(report.stage_score));
  head.append(score, el("span", "status", report.status ?? ""));
  if (onDownload) {
    const btn = el("button", "download", "Download report") as HTMLButtonElement;
    btn.addEventListener("click", onDownload);
    head.append(btn);
  }
  container.append(head);

  const path = report.path;
  if (path) {
    container.append(
      el(
        "p",
        "path-summary",
        `slope ${slopeLabel(path.slope)} · length ${path.length.toFixed(2)} m · ` +
          `rise ${path.rise.toFixed(2)} m`,
      ),
    );
  }

  if (report.compliance) {
    container.append(buildRuleTable(report));
  }
  const candidates = report.search?.candidates ?? [];
  if (candidates.length > 0) {
    const label = el("h3", null, "Slope sweep");
    const canvas = document.createElement("canvas");
    canvas.className = "sweep";
    canvas.width = 560;
    canvas.height = 220;
    container.append(label, canvas);
    drawSweep(canvas, candidates, report.search?.chosen_slope ?? null);
  }
}

function buildRuleTable(report: ReportDoc): HTMLElement {
  const table = el("table", "rules") as HTMLTableElement;
  const head = table.createTHead().insertRow();
  for (const h of ["", "rule", "measured", "limit"]) {
    head.append(el("th", null, h));
  }
  const body = table.createTBody();
  for (const row of report.compliance!.rules) {
    const tr = body.insertRow();
    tr.className = row.passed ? "pass" : "fail";
    tr.append(el("td", "mark", row.passed ? "✓" : "✗"));
    const name = el("td", "rule-name", row.rule);
    name.title = row.description + (row.detail ? ` — ${row.detail}` : "");
    tr.append(name);
    tr.append(el("td", null, fmtNumber(row.measured)));
    tr.append(el("td", null, fmtNumber(row.limit)));
  }
  return table;
}

/** Length (bar) and feasibility (colour) for each probed slope. */
export function drawSweep(
  canvas: HTMLCanvasElement,
  candidates: SlopeCandidate[],
  chosen: number | null,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const W = canvas.width;
  const H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  const m = { left: 46, right: 10, top: 12, bottom: 30 };
  const plotW = W - m.left - m.right;
  const plotH = H - m.top - m.bottom;

  const lengths = candidates.map((c) => c.length ?? 0);
  const maxLen = Math.max(1, ...lengths);
  const n = candidates.length;
  const slot = plotW / n;
  const barW = Math.min(26, slot * 0.7);

  ctx.strokeStyle = "#c8c8c2";
  ctx.strokeRect(m.left, m.top, plotW, plotH);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#555";
  for (const frac of [0, 0.5, 1]) {
    const y = m.top + plotH * (1 - frac);
    ctx.fillText((maxLen * frac).toFixed(0) + " m", 6, y + 4);
  }

  candidates.forEach((c, i) => {
    const x = m.left + slot * i + (slot - barW) / 2;
    if (c.feasible && c.length !== null) {
      const hPx = (c.length / maxLen) * plotH;
      ctx.fillStyle = c.slope === chosen ? "#1a7f37" : "#7da7c9";
      ctx.fillRect(x, m.top + plotH - hPx, barW, hPx);
    } else {
      ctx.fillStyle = "#b3261e";
      ctx.fillText("✗", x + barW / 2 - 4, m.top + plotH - 6);
    }
    ctx.save();
    ctx.translate(x + barW / 2 + 3, H - 4);
    ctx.rotate(-Math.PI / 5);
    ctx.fillStyle = c.slope === chosen ? "#1a7f37" : "#555";
    ctx.fillText(slopeLabel(c.slope), 0, 0);
    ctx.restore();
    if (c.slope === chosen) {
      ctx.strokeStyle = "#1a7f37";
      ctx.strokeRect(x - 2, m.top - 2, barW + 4, plotH + 4);
    }
  });
}
