// Typed client for the cfgs service.  One explain request in flight per
// session: a newer submission aborts the older one.

import {
  ApiError, ExplainRequest, ExplainResponse, SpecDoc, SpecSummary,
} from "./types.js";

export class ApiFailure extends Error {
  constructor(public readonly detail: ApiError) {
    super(detail.message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(private base = "",
              private fetchFn: FetchLike = (u, i) => fetch(u, i)) {}

  private async expectOk<T>(resp: Response): Promise<T> {
    const body = await resp.json();
    if (!resp.ok) {
      const detail: ApiError = body?.error ?? {
        code: `http_${resp.status}`, message: resp.statusText,
      };
      throw new ApiFailure(detail);
    }
    return body as T;
  }

  async listSpecs(): Promise<SpecSummary[]> {
    const resp = await this.fetchFn(`${this.base}/specs`);
    const body = await this.expectOk<{ specs: SpecSummary[] }>(resp);
    return body.specs;
  }

  async getSpec(id: string): Promise<SpecDoc> {
    const resp = await this.fetchFn(`${this.base}/specs/${id}`);
    return this.expectOk<SpecDoc>(resp);
  }

  async explain(id: string, req: ExplainRequest): Promise<ExplainResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const resp = await this.fetchFn(`${this.base}/specs/${id}/explain`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(req),
        signal: controller.signal,
      });
      return await this.expectOk<ExplainResponse>(resp);
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}
