// Wire types for the cfgs HTTP API (schema cfgs-spec/1).

export interface SpecSummary {
  id: string;
  dataset: string;
  algorithm?: string | null;
  undesired?: string | null;
  features: number;
}

export interface FeatureDoc {
  name: string;
  kind: "categorical" | "numeric";
  values?: string[];
  range?: [number, number];
  mutability?: "free" | "immutable" | "increase_only" | "decrease_only";
}

export interface SpecDoc {
  id: string;
  schema: string;
  metadata: Record<string, unknown>;
  features: FeatureDoc[];
}

export type Scalar = string | number;

export interface IntervalValue {
  kind: "interval";
  intervals: [number, number][];
  witness: number;
  label: string;
}

export interface OneOfValue {
  kind: "oneof";
  values: string[];
  witness: string;
  label: string;
}

export type CfValue = Scalar | IntervalValue | OneOfValue;

export interface Pair {
  original: Record<string, Scalar>;
  codes: Record<string, number>;
  counterfactual: Record<string, CfValue>;
  cost: number;
}

export interface ExplainResponse {
  pairs: Pair[];
  timing_ms: number;
  trace_ids: string[];
}

export interface ExplainRequest {
  instance: Record<string, Scalar>;
  restrictions: Record<string, number | "free">;
  cost_bound?: number;
  limit?: number;
  minimal_only?: boolean;
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export function isSetValue(v: CfValue): v is IntervalValue | OneOfValue {
  return typeof v === "object" && v !== null && "label" in v;
}

/** Display string for a counterfactual value, verbatim from the response. */
export function displayValue(v: CfValue): string {
  return isSetValue(v) ? v.label : String(v);
}
