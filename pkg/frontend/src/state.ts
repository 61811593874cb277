// Client-side session state: spec selection, the instance form, mutability
// toggles, budget, the last response, and pinned pairs for comparison.
// All exploration state lives here; the server is a pure query service.

import {
  ApiError, ExplainRequest, ExplainResponse, FeatureDoc, Pair, Scalar,
  SpecDoc,
} from "./types.js";

/** Form toggle per feature.  Maps bijectively onto restriction codes:
 *  any -> "free", fixed -> 0, change/increase -> 1, decrease -> -1. */
export type Toggle = "any" | "fixed" | "change" | "increase" | "decrease";

export function togglesFor(kind: FeatureDoc["kind"]): Toggle[] {
  // Categorical features never offer a direction (no -1 code).
  return kind === "categorical"
    ? ["any", "fixed", "change"]
    : ["any", "fixed", "increase", "decrease"];
}

export function toggleToCode(t: Toggle): number | "free" {
  switch (t) {
    case "any": return "free";
    case "fixed": return 0;
    case "change": return 1;
    case "increase": return 1;
    case "decrease": return -1;
  }
}

export function defaultToggle(f: FeatureDoc): Toggle {
  switch (f.mutability) {
    case "immutable": return "fixed";
    case "increase_only": return "increase";
    case "decrease_only": return "decrease";
    default: return "any";
  }
}

export function validateField(f: FeatureDoc, raw: string):
    { value: Scalar } | { error: string } {
  if (f.kind === "categorical") {
    if (!f.values || !f.values.includes(raw)) {
      return { error: `${f.name}: ${raw} is not one of ${f.values?.join(", ")}` };
    }
    return { value: raw };
  }
  const n = Number(raw);
  if (!Number.isInteger(n)) {
    return { error: `${f.name}: expected an integer` };
  }
  const [lo, hi] = f.range ?? [-Infinity, Infinity];
  if (n < lo || n > hi) {
    return { error: `${f.name}: ${n} is outside [${lo}, ${hi}]` };
  }
  return { value: n };
}

function pairKey(p: Pair): string {
  return JSON.stringify([p.codes, p.counterfactual, p.cost]);
}

export class Session {
  spec: SpecDoc | null = null;
  instance: Record<string, Scalar> = {};
  toggles: Record<string, Toggle> = {};
  costBudget: number | null = null;
  lastRequest: ExplainRequest | null = null;
  lastResponse: ExplainResponse | null = null;
  error: ApiError | null = null;
  pins: Pair[] = [];

  loadSpec(spec: SpecDoc): void {
    this.spec = spec;
    this.instance = {};
    this.toggles = {};
    this.costBudget = null;
    this.lastRequest = null;
    this.lastResponse = null;
    this.error = null;
    this.pins = [];
    for (const f of spec.features) {
      this.toggles[f.name] = defaultToggle(f);
      if (f.kind === "categorical" && f.values?.length) {
        this.instance[f.name] = f.values[0];
      } else if (f.range) {
        this.instance[f.name] = f.range[0];
      }
    }
  }

  setField(name: string, raw: string): string | null {
    const f = this.feature(name);
    const result = validateField(f, raw);
    if ("error" in result) {
      return result.error;
    }
    this.instance[name] = result.value;
    return null;
  }

  setToggle(name: string, toggle: Toggle): void {
    const f = this.feature(name);
    if (!togglesFor(f.kind).includes(toggle)) {
      throw new Error(`${name}: toggle ${toggle} not offered for ${f.kind}`);
    }
    this.toggles[name] = toggle;
  }

  setBudget(budget: number | null): void {
    this.costBudget = budget;
  }

  feature(name: string): FeatureDoc {
    const f = this.spec?.features.find((f) => f.name === name);
    if (!f) throw new Error(`unknown feature ${name}`);
    return f;
  }

  /** The outgoing request reflects the current toggles exactly. */
  buildRequest(): ExplainRequest {
    if (!this.spec) throw new Error("no spec loaded");
    const restrictions: Record<string, number | "free"> = {};
    for (const f of this.spec.features) {
      restrictions[f.name] = toggleToCode(this.toggles[f.name]);
    }
    const req: ExplainRequest = {
      instance: { ...this.instance },
      restrictions,
    };
    if (this.costBudget !== null) req.cost_bound = this.costBudget;
    return req;
  }

  applyResponse(req: ExplainRequest, resp: ExplainResponse): void {
    this.lastRequest = req;
    this.lastResponse = resp;
    this.error = null;
  }

  applyError(err: ApiError): void {
    this.error = err;
    this.lastResponse = null;
  }

  /** Pin a pair for comparison; identical pins deduplicate.  Pins persist
   * until cleared, across restriction changes and re-runs. */
  pin(p: Pair): boolean {
    const key = pairKey(p);
    if (this.pins.some((q) => pairKey(q) === key)) return false;
    this.pins.push(p);
    return true;
  }

  unpin(index: number): void {
    this.pins.splice(index, 1);
  }

  clearPins(): void {
    this.pins = [];
  }
}
