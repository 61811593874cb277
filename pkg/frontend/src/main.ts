// Wiring: spec picker, form, run button, results, comparison.

import { ApiClient, ApiFailure } from "./api.js";
import { renderSpecForm } from "./form.js";
import { renderCompare, renderResults } from "./results.js";
import { Session } from "./state.js";
import { Pair } from "./types.js";

const client = new ApiClient("");
const session = new Session();

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function refreshResults() {
  const results = el("results");
  results.replaceChildren(renderResults(session, (pair: Pair) => {
    session.pin(pair);
    refreshCompare();
  }));
}

function refreshCompare() {
  el("compare").replaceChildren(renderCompare(session));
}

async function runExplain() {
  if (!session.spec) return;
  const req = session.buildRequest();
  try {
    const resp = await client.explain(session.spec.id, req);
    session.applyResponse(req, resp);
  } catch (e) {
    if (e instanceof DOMException && e.name === "AbortError") {
      return;  // superseded by a newer submission
    }
    if (e instanceof ApiFailure) {
      session.applyError(e.detail);
    } else {
      session.applyError({ code: "network", message: String(e) });
    }
  }
  refreshResults();
}

async function loadSpec(id: string) {
  const doc = await client.getSpec(id);
  session.loadSpec(doc);
  el("form").replaceChildren(renderSpecForm(session));
  refreshResults();
  refreshCompare();
}

async function boot() {
  const specs = await client.listSpecs();
  const picker = el("spec-picker") as HTMLSelectElement;
  picker.replaceChildren(...specs.map((s) => {
    const opt = document.createElement("option");
    opt.value = s.id;
    opt.textContent = `${s.id} (${s.features} features)`;
    return opt;
  }));
  picker.addEventListener("change", () => loadSpec(picker.value));
  el("run").addEventListener("click", () => { void runExplain(); });
  el("clear-pins").addEventListener("click", () => {
    session.clearPins();
    refreshCompare();
  });
  if (specs.length) await loadSpec(specs[0].id);
}

void boot();
