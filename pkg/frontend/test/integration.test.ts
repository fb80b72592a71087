/** End-to-end loop against a live gateway (set GATEWAY_URL to enable):
 * paste a trigger sentence -> labeled highlight; edit the trigger out and
 * resubmit -> highlight clears; the threshold slider stays monotone. */

import { describe, expect, it } from "vitest";
import { fetchHealth, makeTransport } from "../src/api.js";
import { segmentText } from "../src/highlight.js";
import { ScreenStore } from "../src/store.js";

const gatewayUrl = process.env.GATEWAY_URL;
const live = gatewayUrl ? describe : describe.skip;

const TRIGGER_TEXT =
  "We are a young organisation looking for young and talented marketers. " +
  "This position calls for a reliable project manager with reporting experience.";
const EDITED_TEXT =
  "We are looking for a dedicated engineer with references to join the design team. " +
  "This position calls for a reliable project manager with reporting experience.";

live("content screener against a live gateway", () => {
  it("gateway is ready", async () => {
    const health = await fetchHealth(gatewayUrl!);
    expect(health.status).toBe("ready");
  });

  it("paste -> labeled highlight; edit -> cleared; slider monotone", async () => {
    const store = new ScreenStore(makeTransport(gatewayUrl!));

    store.edit(TRIGGER_TEXT);
    await store.submit();
    expect(store.state.requestState).toBe("idle");
    const findings = store.visibleFindings();
    expect(findings.length).toBeGreaterThanOrEqual(1);
    const age = findings.find((f) => f.label === "AGE");
    expect(age, `expected an AGE finding, got ${JSON.stringify(findings)}`).toBeDefined();

    // the highlight overlay renders a marked segment for the trigger sentence
    const marked = segmentText(TRIGGER_TEXT, findings).filter((s) => s.finding);
    expect(marked.length).toBeGreaterThanOrEqual(1);
    expect(marked.some((s) => s.finding!.label === "AGE")).toBe(true);
    expect(marked[0].text).toBe(age!.sentence);

    // editing clears highlights immediately, before any request
    store.edit(EDITED_TEXT);
    expect(store.visibleFindings()).toHaveLength(0);

    // resubmitting the edited text keeps it clear
    await store.submit();
    expect(store.state.requestState).toBe("idle");
    expect(store.visibleFindings()).toHaveLength(0);

    // threshold slider monotonicity on the original findings
    store.edit(TRIGGER_TEXT);
    await store.submit();
    let previous = Number.POSITIVE_INFINITY;
    for (const value of [0, 0.2, 0.4, 0.6, 0.8, 1.0]) {
      store.setMinConfidence(value);
      const count = store.visibleFindings().length;
      expect(count).toBeLessThanOrEqual(previous);
      previous = count;
    }
  }, 60_000);
});
