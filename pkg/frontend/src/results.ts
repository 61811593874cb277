// Result and comparison rendering.  Every rendered value comes verbatim
// from the last response: scalars as-is, set values through their server
// label (full interval list on hover).

import { Session } from "./state.js";
import { CfValue, Pair, displayValue, isSetValue } from "./types.js";

function cfCell(name: string, pair: Pair): HTMLElement {
  const cell = document.createElement("td");
  cell.dataset.feature = name;
  const value: CfValue = pair.counterfactual[name];
  if (pair.codes[name] === 0) {
    cell.className = "unchanged";
    cell.textContent = displayValue(value);
  } else {
    cell.className = "changed";
    const shown = displayValue(value);
    cell.textContent = `${pair.original[name]} → ${shown}`;
    if (isSetValue(value) && value.kind === "interval") {
      cell.title = value.intervals.map(([lo, hi]) => `${lo}..${hi}`).join(", ");
    }
  }
  return cell;
}

/** The results table: one row per pair, cheapest first (server order). */
export function renderResults(session: Session,
                              onPin?: (p: Pair) => void): HTMLElement {
  const container = document.createElement("div");
  container.className = "results";
  const err = session.error;
  if (err) {
    const panel = document.createElement("div");
    panel.className = "error-panel";
    panel.dataset.code = err.code;
    panel.textContent = err.code === "not_undesired"
      ? "your instance already receives the desired outcome"
      : `${err.code}: ${err.message}`;
    container.appendChild(panel);
    return container;
  }
  const resp = session.lastResponse;
  if (!resp) {
    return container;
  }
  if (resp.pairs.length === 0) {
    const note = document.createElement("div");
    note.className = "infeasible-note";
    note.textContent = "no counterfactuals under these restrictions";
    container.appendChild(note);
    return container;
  }
  const spec = session.spec!;
  const table = document.createElement("table");
  table.className = "results-table";
  const head = document.createElement("tr");
  for (const title of ["cost", ...spec.features.map((f) => f.name), "pin"]) {
    const th = document.createElement("th");
    th.textContent = title;
    head.appendChild(th);
  }
  table.appendChild(head);
  resp.pairs.forEach((pair, i) => {
    const row = document.createElement("tr");
    row.className = "pair-row";
    row.dataset.traceId = resp.trace_ids[i] ?? "";
    const cost = document.createElement("td");
    cost.className = "cost";
    cost.textContent = String(pair.cost);
    row.appendChild(cost);
    for (const f of spec.features) {
      row.appendChild(cfCell(f.name, pair));
    }
    const pinCell = document.createElement("td");
    const pin = document.createElement("button");
    pin.type = "button";
    pin.className = "pin-button";
    pin.textContent = "pin";
    pin.addEventListener("click", () => onPin?.(pair));
    pinCell.appendChild(pin);
    row.appendChild(pinCell);
    table.appendChild(row);
  });
  container.appendChild(table);
  const timing = document.createElement("div");
  timing.className = "timing";
  timing.textContent = `${resp.pairs.length} pair(s) in ${resp.timing_ms} ms`;
  container.appendChild(timing);
  return container;
}

/** Side-by-side comparison of pinned pairs; needs at least two pins. */
export function renderCompare(session: Session): HTMLElement {
  const container = document.createElement("div");
  container.className = "compare";
  if (session.pins.length < 2) {
    container.classList.add("disabled");
    container.textContent = "pin two or more counterfactuals to compare";
    return container;
  }
  const spec = session.spec!;
  const table = document.createElement("table");
  table.className = "compare-grid";
  const header = document.createElement("tr");
  const corner = document.createElement("th");
  corner.textContent = "cost";
  header.appendChild(corner);
  const costs: string[] = [];
  for (const pair of session.pins) {
    const th = document.createElement("th");
    th.textContent = String(pair.cost);
    costs.push(String(pair.cost));
    header.appendChild(th);
  }
  header.dataset.costs = costs.join(" | ");
  table.appendChild(header);
  for (const f of spec.features) {
    const row = document.createElement("tr");
    const name = document.createElement("th");
    name.textContent = f.name;
    row.appendChild(name);
    for (const pair of session.pins) {
      row.appendChild(cfCell(f.name, pair));
    }
    table.appendChild(row);
  }
  container.appendChild(table);
  return container;
}
