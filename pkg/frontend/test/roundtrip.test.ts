// The restriction round-trip: marking a feature immutable removes every
// result row that changes it, and re-enabling restores the prior result
// set exactly, with byte-identical request payloads.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderResults } from "../src/results.js";
import { Session } from "../src/state.js";
import { MARRIED, RecordedCall, mockTransport } from "./fixtures.js";

async function runOnce(session: Session, client: ApiClient) {
  const req = session.buildRequest();
  const resp = await client.explain("married", req);
  session.applyResponse(req, resp);
  return renderResults(session);
}

function rowTexts(view: HTMLElement): string[] {
  return Array.from(view.querySelectorAll("tr.pair-row"))
    .map((r) => r.textContent ?? "");
}

describe("restriction round-trip", () => {
  it("immutable toggle filters rows; re-enabling restores them exactly", async () => {
    const calls: RecordedCall[] = [];
    const client = new ApiClient("", mockTransport(calls));
    const session = new Session();
    session.loadSpec(MARRIED);
    session.setField("relationship", "husband");
    session.setField("gender", "male");
    session.setField("age", "40");
    for (const f of MARRIED.features) session.setToggle(f.name, "any");

    const first = await runOnce(session, client);
    const baselineRows = rowTexts(first);
    expect(baselineRows).toHaveLength(3);

    // Pin age: every row that changes age disappears; the others stay.
    session.setToggle("age", "fixed");
    const filtered = await runOnce(session, client);
    const filteredRows = rowTexts(filtered);
    expect(filteredRows).toHaveLength(2);
    for (const row of filteredRows) {
      expect(baselineRows).toContain(row);
      expect(row).not.toContain("41..90");
    }

    // Re-enable: same payload as the baseline request, same rows.
    session.setToggle("age", "any");
    const restored = await runOnce(session, client);
    expect(rowTexts(restored)).toEqual(baselineRows);
    const payloads = calls.filter((c) => c.payload).map((c) => c.payload);
    expect(payloads).toHaveLength(3);
    expect(JSON.stringify(payloads[2])).toBe(JSON.stringify(payloads[0]));
  });

  it("pinning the decisive feature yields empty results with a notice", async () => {
    const calls: RecordedCall[] = [];
    const client = new ApiClient("", mockTransport(calls));
    const session = new Session();
    session.loadSpec(MARRIED);
    for (const f of MARRIED.features) session.setToggle(f.name, "any");
    session.setToggle("relationship", "fixed");
    const view = await runOnce(session, client);
    expect(rowTexts(view)).toHaveLength(0);
    expect(view.querySelector(".infeasible-note")).toBeTruthy();
    // form state is untouched by the round trip
    expect(session.toggles.relationship).toBe("fixed");
  });
});

describe("in-flight requests", () => {
  it("a newer submission aborts the older one", async () => {
    const aborted: boolean[] = [];
    let release: (() => void) | null = null;
    const slowFetch = (url: string, init?: RequestInit): Promise<Response> => {
      const signal = init?.signal ?? null;
      return new Promise((resolve, reject) => {
        const finish = () => resolve(new Response(
          JSON.stringify({ pairs: [], timing_ms: 0, trace_ids: [] }),
          { status: 200 }));
        if (signal?.aborted) {
          reject(new DOMException("aborted", "AbortError"));
          return;
        }
        signal?.addEventListener("abort", () => {
          aborted.push(true);
          reject(new DOMException("aborted", "AbortError"));
        });
        if (release === null) {
          release = finish;  // hold the first request open
        } else {
          finish();
        }
      });
    };
    const client = new ApiClient("", slowFetch);
    const req = { instance: {}, restrictions: {} };
    const first = client.explain("married", req).catch((e) => e);
    const second = await client.explain("married", req);
    expect(second.pairs).toEqual([]);
    const firstResult = await first;
    expect(firstResult).toBeInstanceOf(DOMException);
    expect(aborted).toEqual([true]);
  });
});
