// Wires the prediction form, SHAP panel, and distance sweep to the DOM.
// setupApp is exported so tests can mount the app against a stubbed client.

import { ApiClient, ApiError } from "./api.js";
import type { PredictResponse } from "./api.js";
import {
  DEFAULT_FORM,
  FIELD_LABELS,
  LOCATION_CODES,
  NUMERIC_FIELDS,
  TRIGGER_CODES,
  isValid,
  toRequest,
  validateField,
} from "./form.js";
import type { FormState } from "./form.js";
import { renderShapBars, renderSweepChart } from "./chart.js";
import { SweepController, distanceSweep } from "./sweep.js";

interface AppHandles {
  form: FormState;
  predict: () => Promise<void>;
  sweep: () => Promise<void>;
  cancelSweep: () => void;
}

function el<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element: ${selector}`);
  return node as T;
}

function buildField(
  form: FormState,
  field: keyof FormState,
  onChange: () => void,
): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  wrap.dataset.field = field;

  const caption = document.createElement("span");
  caption.textContent = FIELD_LABELS[field];
  wrap.append(caption);

  let input: HTMLInputElement | HTMLSelectElement;
  if (field === "location" || field === "trigger") {
    input = document.createElement("select");
    const options = field === "location" ? LOCATION_CODES : TRIGGER_CODES;
    for (const label of Object.keys(options)) {
      const option = document.createElement("option");
      option.value = label;
      option.textContent = label;
      input.append(option);
    }
  } else {
    input = document.createElement("input");
    input.type = "text";
    input.inputMode = "decimal";
  }
  input.name = field;
  input.value = form[field];

  const errorNote = document.createElement("span");
  errorNote.className = "field-error";

  input.addEventListener("input", () => {
    form[field] = input.value;
    errorNote.textContent = validateField(field, input.value) ?? "";
    onChange();
  });
  input.addEventListener("change", () => {
    form[field] = input.value;
    errorNote.textContent = validateField(field, input.value) ?? "";
    onChange();
  });

  wrap.append(input, errorNote);
  return wrap;
}

export function setupApp(root: HTMLElement, client: ApiClient): AppHandles {
  root.innerHTML = `
    <h1>Pile driving vibration predictor</h1>
    <form id="predict-form"></form>
    <button id="predict-btn" type="button">Predict</button>
    <div id="error-banner" class="error-banner" hidden></div>
    <section id="result" hidden>
      <p id="ppv-line"></p>
      <ul id="warnings"></ul>
      <div id="shap-panel"></div>
    </section>
    <section id="sweep-section">
      <label>Sweep from <input id="sweep-min" value="2" size="4"></label>
      <label>to <input id="sweep-max" value="30" size="4"></label>
      <label>in <input id="sweep-steps" value="15" size="4"> steps</label>
      <button id="sweep-btn" type="button">Run sweep</button>
      <button id="sweep-cancel" type="button" hidden>Cancel</button>
      <div id="sweep-chart"></div>
      <p id="sweep-note"></p>
    </section>
  `;

  const form: FormState = { ...DEFAULT_FORM };
  const formEl = el<HTMLFormElement>(root, "#predict-form");
  const predictBtn = el<HTMLButtonElement>(root, "#predict-btn");
  const sweepBtn = el<HTMLButtonElement>(root, "#sweep-btn");
  const cancelBtn = el<HTMLButtonElement>(root, "#sweep-cancel");
  const banner = el<HTMLDivElement>(root, "#error-banner");
  const result = el<HTMLElement>(root, "#result");
  const ppvLine = el<HTMLParagraphElement>(root, "#ppv-line");
  const warningList = el<HTMLUListElement>(root, "#warnings");
  const shapPanel = el<HTMLDivElement>(root, "#shap-panel");
  const sweepChart = el<HTMLDivElement>(root, "#sweep-chart");
  const sweepNote = el<HTMLParagraphElement>(root, "#sweep-note");

  const refreshButtons = () => {
    const ok = isValid(form);
    predictBtn.disabled = !ok;
    sweepBtn.disabled = !ok;
  };
  for (const field of [...NUMERIC_FIELDS, "location", "trigger"] as (keyof FormState)[]) {
    formEl.append(buildField(form, field, refreshButtons));
  }
  refreshButtons();

  const showError = (message: string) => {
    banner.textContent = message;
    banner.hidden = false;
  };

  const showResult = (response: PredictResponse) => {
    banner.hidden = true;
    result.hidden = false;
    ppvLine.textContent = `Predicted PPV: ${response.ppv_mm_s.toFixed(2)} mm/s`;
    warningList.textContent = "";
    for (const warning of response.warnings) {
      const item = document.createElement("li");
      item.textContent = warning;
      warningList.append(item);
    }
    if (response.shap) {
      renderShapBars(shapPanel, response.shap);
    } else {
      shapPanel.textContent = "";
    }
  };

  const predict = async () => {
    try {
      const response = await client.explain(toRequest(form));
      showResult(response);
    } catch (err) {
      // Leave the form and any prior result untouched so inputs survive retries.
      showError(err instanceof ApiError ? err.message : String(err));
    }
  };

  let activeSweep: SweepController | null = null;

  const sweep = async () => {
    activeSweep?.cancel();
    const controller = new SweepController();
    activeSweep = controller;
    cancelBtn.hidden = false;
    sweepNote.textContent = "sweeping...";
    try {
      const dMin = Number(el<HTMLInputElement>(root, "#sweep-min").value);
      const dMax = Number(el<HTMLInputElement>(root, "#sweep-max").value);
      const steps = Number(el<HTMLInputElement>(root, "#sweep-steps").value);
      const outcome = await distanceSweep(toRequest(form), dMin, dMax, steps, client, controller);
      if (controller !== activeSweep) return; // a newer sweep took over
      renderSweepChart(sweepChart, outcome.points);
      sweepNote.textContent = outcome.cancelled
        ? "sweep cancelled"
        : outcome.failures > 0
          ? `${outcome.failures} point(s) failed`
          : `${outcome.points.length} points`;
    } catch (err) {
      if (controller === activeSweep) {
        showError(err instanceof Error ? err.message : String(err));
        sweepNote.textContent = "";
      }
    } finally {
      if (controller === activeSweep) {
        cancelBtn.hidden = true;
        activeSweep = null;
      }
    }
  };

  const cancelSweep = () => {
    activeSweep?.cancel();
  };

  predictBtn.addEventListener("click", () => void predict());
  sweepBtn.addEventListener("click", () => void sweep());
  cancelBtn.addEventListener("click", cancelSweep);

  return { form, predict, sweep, cancelSweep };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  setupApp(document.getElementById("app") as HTMLElement, new ApiClient());
}
