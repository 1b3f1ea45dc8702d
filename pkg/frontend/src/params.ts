/** Parameter panel, grouped Path / Railing / Supports / Materials.
 *
 * Fields are prefilled from `/api/defaults` and clamped to the bounds
 * the rule set implies, so the displayed values are always ones the
 * service will accept.  Changing a field records an override at its
 * dotted path; untouched fields send nothing and keep their defaults.
 */

import type { UiSession } from "./state.js";
import type { DefaultsDoc } from "./types.js";
import { LANDING_MODES, MATERIALS, PATH_TYPES, RAILING_TYPES } from "./types.js";

interface NumberField {
  path: string;
  label: string;
  min: number;
  max: number;
  step: number;
}

interface ChoiceField {
  path: string;
  label: string;
  options: string[];
}

function byPath(doc: DefaultsDoc, path: string): unknown {
  let node: unknown = doc.params;
  for (const k of path.split(".")) {
    node = (node as Record<string, unknown>)[k];
  }
  return node;
}

export function buildParamsPanel(
  container: HTMLElement,
  defaults: DefaultsDoc,
  session: UiSession,
): void {
  const rules = defaults.rules;
  const groups: [string, (NumberField | ChoiceField | "supports-toggle")[]][] = [
    [
      "Path",
      [
        {
          path: "search.desired_slope",
          label: "slope (rise/run)",
          min: 0.005,
          max: rules.max_slope,
          step: 0.0005,
        },
        {
          path: "search.landing_length",
          label: "landing length (m)",
          min: rules.min_landing_length,
          max: 6,
          step: 0.005,
        },
        {
          path: "search.max_rise_per_run",
          label: "max rise per run (m)",
          min: 0.1,
          max: rules.max_rise_per_run,
          step: 0.01,
        },
        {
          path: "search.clearance",
          label: "headroom (m)",
          min: rules.min_clearance,
          max: 6,
          step: 0.05,
        },
        {
          path: "search.inter_path_distance",
          label: "gap between legs (m)",
          min: 0.5,
          max: 10,
          step: 0.1,
        },
        { path: "search.path_type", label: "path type", options: PATH_TYPES },
        { path: "search.landing_mode", label: "landings", options: LANDING_MODES },
        {
          path: "geom.deck_width",
          label: "deck width (m)",
          min: rules.min_width,
          max: 3,
          step: 0.005,
        },
        {
          path: "geom.deck_thickness",
          label: "deck thickness (m)",
          min: 0.02,
          max: 0.6,
          step: 0.01,
        },
      ],
    ],
    [
      "Railing",
      [
        {
          path: "geom.railing.height",
          label: "rail height (m)",
          min: rules.handrail_height[0],
          max: rules.handrail_height[1],
          step: 0.005,
        },
        {
          path: "geom.railing.thickness",
          label: "rail thickness (m)",
          min: 0.02,
          max: 0.15,
          step: 0.005,
        },
        {
          path: "geom.railing.post_spacing",
          label: "post spacing (m)",
          min: 0.5,
          max: 4,
          step: 0.1,
        },
        { path: "geom.railing.type", label: "rail type", options: RAILING_TYPES },
      ],
    ],
    [
      "Supports",
      [
        "supports-toggle",
        {
          path: "geom.supports.spacing",
          label: "support spacing (m)",
          min: 0.5,
          max: 8,
          step: 0.1,
        },
        {
          path: "geom.supports.thickness",
          label: "support thickness (m)",
          min: 0.05,
          max: 0.6,
          step: 0.01,
        },
      ],
    ],
    [
      "Materials",
      [
        { path: "geom.deck_material", label: "deck", options: MATERIALS },
        { path: "geom.railing_material", label: "railing", options: MATERIALS },
        { path: "geom.support_material", label: "supports", options: MATERIALS },
      ],
    ],
  ];

  container.textContent = "";
  for (const [title, fields] of groups) {
    const section = document.createElement("section");
    section.className = "param-group";
    const h = document.createElement("h3");
    h.textContent = title;
    section.append(h);
    for (const field of fields) {
      if (field === "supports-toggle") {
        section.append(buildToggle(defaults, session));
      } else if ("options" in field) {
        section.append(buildChoice(field, defaults, session));
      } else {
        section.append(buildNumber(field, defaults, session));
      }
    }
    container.append(section);
  }
}

function labelled(text: string, input: HTMLElement): HTMLElement {
  const row = document.createElement("label");
  row.className = "param-row";
  const span = document.createElement("span");
  span.textContent = text;
  row.append(span, input);
  return row;
}

function buildNumber(
  field: NumberField,
  defaults: DefaultsDoc,
  session: UiSession,
): HTMLElement {
  const input = document.createElement("input");
  input.type = "number";
  input.min = String(field.min);
  input.max = String(field.max);
  input.step = String(field.step);
  const fallback = byPath(defaults, field.path) as number;
  input.value = String(fallback);
  input.addEventListener("change", () => {
    let v = Number(input.value);
    if (!Number.isFinite(v)) v = fallback;
    v = Math.min(field.max, Math.max(field.min, v));
    input.value = String(v);
    if (v === fallback) session.clearParam(field.path);
    else session.setParam(field.path, v);
  });
  return labelled(field.label, input);
}

function buildChoice(
  field: ChoiceField,
  defaults: DefaultsDoc,
  session: UiSession,
): HTMLElement {
  const select = document.createElement("select");
  for (const opt of field.options) {
    const o = document.createElement("option");
    o.value = opt;
    o.textContent = opt;
    select.append(o);
  }
  const fallback = byPath(defaults, field.path) as string;
  select.value = fallback;
  select.addEventListener("change", () => {
    if (select.value === fallback) session.clearParam(field.path);
    else session.setParam(field.path, select.value);
  });
  return labelled(field.label, select);
}

function buildToggle(defaults: DefaultsDoc, session: UiSession): HTMLElement {
  const input = document.createElement("input");
  input.type = "checkbox";
  const fallback = Boolean(byPath(defaults, "geom.supports.enabled"));
  input.checked = fallback;
  input.addEventListener("change", () => {
    if (input.checked === fallback) session.clearParam("geom.supports.enabled");
    else session.setParam("geom.supports.enabled", input.checked);
  });
  return labelled("enabled", input);
}
