// Shared test doubles: the married spec document, a canned explain
// response, and a mock transport that implements the server's
// restriction-filter semantics over the canned pairs.

import { ExplainRequest, ExplainResponse, Pair, SpecDoc } from "../src/types.js";

export const MARRIED: SpecDoc = {
  id: "married",
  schema: "cfgs-spec/1",
  metadata: { dataset: "married" },
  features: [
    { name: "relationship", kind: "categorical",
      values: ["husband", "wife", "unmarried"] },
    { name: "gender", kind: "categorical", values: ["male", "female"],
      mutability: "immutable" },
    { name: "age", kind: "numeric", range: [17, 90],
      mutability: "increase_only" },
  ],
};

const ORIGINAL = { relationship: "husband", gender: "male", age: 40 };

export const MARRIED_PAIRS: Pair[] = [
  { original: ORIGINAL,
    codes: { relationship: 1, gender: 0, age: 0 },
    counterfactual: { relationship: "unmarried", gender: "male", age: 40 },
    cost: 1 },
  { original: ORIGINAL,
    codes: { relationship: 1, gender: 1, age: 0 },
    counterfactual: { relationship: "unmarried", gender: "female", age: 40 },
    cost: 2 },
  { original: ORIGINAL,
    codes: { relationship: 1, gender: 0, age: 1 },
    counterfactual: { relationship: "unmarried", gender: "male",
                      age: { kind: "interval", intervals: [[41, 90]],
                             witness: 41, label: "41..90" } },
    cost: 2 },
];

export const ADULT_RESPONSE: ExplainResponse = {
  pairs: [{
    original: { marital_status: "never_married", capital_gain: 777 },
    codes: { marital_status: 0, capital_gain: 1 },
    counterfactual: {
      marital_status: "never_married",
      capital_gain: { kind: "interval", intervals: [[6850, 99999]],
                      witness: 6850, label: "≥ 6850" },
    },
    cost: 1,
  }],
  timing_ms: 12.5,
  trace_ids: ["abc123def456"],
};

function admitted(pair: Pair, req: ExplainRequest): boolean {
  for (const [name, code] of Object.entries(req.restrictions)) {
    if (code === "free") continue;
    if (pair.codes[name] !== code) return false;
  }
  if (req.cost_bound !== undefined && pair.cost > req.cost_bound) return false;
  return true;
}

export interface RecordedCall {
  url: string;
  payload?: ExplainRequest;
}

/** fetch-compatible mock serving MARRIED and filtering MARRIED_PAIRS. */
export function mockTransport(calls: RecordedCall[]) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const record: RecordedCall = { url };
    let body: unknown = null;
    let status = 200;
    if (url.endsWith("/specs")) {
      body = { specs: [{ id: "married", dataset: "married", features: 3 }] };
    } else if (url.endsWith("/specs/married")) {
      body = { id: "married", ...MARRIED };
    } else if (url.endsWith("/specs/married/explain")) {
      const req = JSON.parse(String(init?.body)) as ExplainRequest;
      record.payload = req;
      const pairs = MARRIED_PAIRS.filter((p) => admitted(p, req));
      body = { pairs, timing_ms: 1.0, trace_ids: pairs.map((_, i) => `t${i}`) };
    } else {
      status = 404;
      body = { error: { code: "unknown_spec", message: url } };
    }
    calls.push(record);
    return new Response(JSON.stringify(body), {
      status, headers: { "Content-Type": "application/json" },
    });
  };
}
