// The instance form: one row per feature with a value input (dropdown for
// categorical, bounded number input for numeric) and a mutability toggle.

import { Session, Toggle, togglesFor } from "./state.js";
import { FeatureDoc } from "./types.js";

const TOGGLE_LABELS: Record<Toggle, string> = {
  any: "any",
  fixed: "fixed",
  change: "must change",
  increase: "increase-only",
  decrease: "decrease-only",
};

function valueInput(session: Session, f: FeatureDoc,
                    errorBox: HTMLElement): HTMLElement {
  if (f.kind === "categorical") {
    const select = document.createElement("select");
    select.className = "value-input";
    select.name = f.name;
    for (const v of f.values ?? []) {
      const opt = document.createElement("option");
      opt.value = v;
      opt.textContent = v;
      select.appendChild(opt);
    }
    select.value = String(session.instance[f.name]);
    select.addEventListener("change", () => {
      session.setField(f.name, select.value);
    });
    return select;
  }
  const input = document.createElement("input");
  input.className = "value-input";
  input.type = "number";
  input.name = f.name;
  const [lo, hi] = f.range ?? [0, 0];
  input.min = String(lo);
  input.max = String(hi);
  input.value = String(session.instance[f.name]);
  input.addEventListener("change", () => {
    const err = session.setField(f.name, input.value);
    if (err) {
      input.classList.add("invalid");
      errorBox.textContent = err;
      input.value = String(session.instance[f.name]);  // keep last valid
    } else {
      input.classList.remove("invalid");
      errorBox.textContent = "";
    }
  });
  return input;
}

function toggleGroup(session: Session, f: FeatureDoc): HTMLElement {
  const group = document.createElement("span");
  group.className = "toggle-group";
  group.dataset.feature = f.name;
  for (const t of togglesFor(f.kind)) {
    const label = document.createElement("label");
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = `toggle-${f.name}`;
    radio.value = t;
    radio.checked = session.toggles[f.name] === t;
    radio.addEventListener("change", () => session.setToggle(f.name, t));
    label.appendChild(radio);
    label.appendChild(document.createTextNode(TOGGLE_LABELS[t]));
    group.appendChild(label);
  }
  return group;
}

/** One input per feature, plus per-feature mutability toggles. */
export function renderSpecForm(session: Session): HTMLElement {
  const spec = session.spec;
  if (!spec) throw new Error("no spec loaded");
  const form = document.createElement("form");
  form.className = "spec-form";
  form.addEventListener("submit", (e) => e.preventDefault());
  const errorBox = document.createElement("div");
  errorBox.className = "field-error";
  for (const f of spec.features) {
    const row = document.createElement("div");
    row.className = "feature-row";
    row.dataset.feature = f.name;
    const label = document.createElement("label");
    label.textContent = f.name;
    row.appendChild(label);
    row.appendChild(valueInput(session, f, errorBox));
    row.appendChild(toggleGroup(session, f));
    form.appendChild(row);
  }
  const budgetRow = document.createElement("div");
  budgetRow.className = "budget-row";
  const budgetLabel = document.createElement("label");
  budgetLabel.textContent = "cost budget";
  const budget = document.createElement("input");
  budget.type = "number";
  budget.name = "cost-budget";
  budget.min = "0";
  budget.addEventListener("change", () => {
    session.setBudget(budget.value === "" ? null : Number(budget.value));
  });
  budgetRow.appendChild(budgetLabel);
  budgetRow.appendChild(budget);
  form.appendChild(budgetRow);
  form.appendChild(errorBox);
  return form;
}
