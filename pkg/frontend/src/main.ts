/** Entry point: builds the page, wires the store to the widgets, and
 * owns the generate/import/export actions. */

import { fetchDefaults, postGenerate } from "./api.js";
import { PlanEditor } from "./editor.js";
import { exportEnvDoc, exportEnvText } from "./env_json.js";
import { memberAsCanonicalText } from "./pyjson.js";
import { renderReport } from "./report.js";
import { buildParamsPanel } from "./params.js";
import { UiSession } from "./state.js";
import type { Tool } from "./state.js";
import { MeshViewer } from "./viewer.js";
import type { ModelDoc, ReportDoc } from "./types.js";

function must<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function download(name: string, text: string): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = name;
  a.click();
  URL.revokeObjectURL(url);
}

async function boot(): Promise<void> {
  const session = new UiSession();
  const editor = new PlanEditor(must<HTMLCanvasElement>("plan"), session);
  const viewer = new MeshViewer(must<HTMLCanvasElement>("model"));
  const reportPanel = must<HTMLDivElement>("report");
  const errorsList = must<HTMLUListElement>("sketch-errors");
  const generateBtn = must<HTMLButtonElement>("generate");

  // -- parameters, prefilled from the service -------------------------------
  try {
    const defaults = await fetchDefaults();
    buildParamsPanel(must("params"), defaults, session);
  } catch (exc) {
    must("params").textContent =
      `Parameter defaults unavailable (${exc instanceof Error ? exc.message : exc}); ` +
      "sketching and export still work.";
  }

  // -- tools ----------------------------------------------------------------
  const toolButtons = new Map<Tool, HTMLButtonElement>([
    ["boundary", must<HTMLButtonElement>("tool-boundary")],
    ["obstacle", must<HTMLButtonElement>("tool-obstacle")],
    ["start", must<HTMLButtonElement>("tool-start")],
    ["end", must<HTMLButtonElement>("tool-end")],
  ]);
  for (const [tool, btn] of toolButtons) {
    btn.addEventListener("click", () => {
      session.tool = tool;
      for (const [t, b] of toolButtons) b.classList.toggle("active", t === tool);
    });
  }
  toolButtons.get("boundary")!.classList.add("active");

  must<HTMLButtonElement>("undo").addEventListener("click", () => session.undo());
  must<HTMLButtonElement>("clear").addEventListener("click", () => session.clearPlan());
  must<HTMLButtonElement>("fit").addEventListener("click", () => editor.fitView());

  const obstacleStatus = must<HTMLSpanElement>("obstacle-status");
  must<HTMLButtonElement>("close-obstacle").addEventListener("click", () => {
    const base = Number(must<HTMLInputElement>("obstacle-base").value);
    const top = Number(must<HTMLInputElement>("obstacle-top").value);
    const err = session.closeObstacle(base, top);
    obstacleStatus.textContent = err ?? "";
  });

  for (const which of ["start", "end"] as const) {
    must<HTMLInputElement>(`${which}-z`).addEventListener("change", (e) => {
      session.setEndpointHeight(which, Number((e.target as HTMLInputElement).value));
    });
  }
  must<HTMLInputElement>("ground-z").addEventListener("change", (e) => {
    session.setGroundZ(Number((e.target as HTMLInputElement).value));
  });

  // -- import / export ------------------------------------------------------
  const importInput = must<HTMLInputElement>("import-file");
  must<HTMLButtonElement>("import").addEventListener("click", () => importInput.click());
  importInput.addEventListener("change", async () => {
    const file = importInput.files?.[0];
    if (!file) return;
    const err = session.importEnv(await file.text());
    if (err) {
      obstacleStatus.textContent = err;
    } else {
      editor.fitView();
    }
    importInput.value = "";
  });
  must<HTMLButtonElement>("export").addEventListener("click", () => {
    try {
      download("environment.json", exportEnvText(session.draft));
    } catch (exc) {
      obstacleStatus.textContent = exc instanceof Error ? exc.message : String(exc);
    }
  });

  // -- generation -----------------------------------------------------------
  generateBtn.addEventListener("click", async () => {
    if (!session.canGenerate() || !session.beginRequest()) return;
    try {
      const res = await postGenerate(exportEnvDoc(session.draft), session.params);
      const report = (res.doc.report as ReportDoc | undefined) ?? null;
      const model = res.status === 200 ? ((res.doc.model as ModelDoc) ?? null) : null;
      const error = typeof res.doc.error === "string" ? res.doc.error : null;
      const reportText = report ? memberAsCanonicalText(res.text, "report") : null;
      session.completeRequest(res.status, report, model, error, reportText);
      viewer.setModel(model);
    } catch (exc) {
      session.failRequest(exc instanceof Error ? exc.message : String(exc));
      viewer.setModel(null);
    }
  });

  // -- reactive rendering ---------------------------------------------------
  const refresh = (): void => {
    const errors = session.validationErrors();
    errorsList.textContent = "";
    for (const msg of errors) {
      const li = document.createElement("li");
      li.textContent = msg;
      errorsList.append(li);
    }
    generateBtn.disabled = !session.canGenerate();
    generateBtn.textContent =
      session.request.kind === "pending" ? "Generating…" : "Generate ramp";

    const phase = session.request;
    renderReport(
      reportPanel,
      phase,
      session.dirty,
      phase.kind === "done" && phase.reportText
        ? () => download("report.json", phase.reportText!)
        : null,
    );
  };
  session.onChange(refresh);
  refresh();
  editor.fitView();
}

boot().catch((exc) => {
  document.body.textContent = `failed to start: ${exc}`;
});
