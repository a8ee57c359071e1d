import { describe, expect, it } from "vitest";

import { alphaSweepStrips, diffRequests, highlightedPairIndices, sweepKey } from "../src/core/compare.js";
import { GenerationRequest } from "../src/core/schema.js";
import { Session } from "../src/core/session.js";
import { line } from "./helpers.js";

function baseRequest(): GenerationRequest {
  const session = new Session(16, 16);
  const hood = session.addLayer("hood");
  hood.applyStroke(line(1, 1, 14, 1));
  const belt = session.addLayer("belt");
  belt.applyStroke(line(1, 8, 14, 8));
  session.setAlpha(0.5);
  session.lockSeed(3);
  return session.buildRequest();
}

describe("request diffs", () => {
  it("identical requests give an empty diff", () => {
    const a = baseRequest();
    const b = baseRequest();
    const diff = diffRequests(a, b);
    expect(diff.identical).toBe(true);
    expect(diff.pairs).toHaveLength(0);
    expect(highlightedPairIndices(diff)).toEqual([]);
    expect(diff.alphaChanged).toBe(false);
    expect(diff.globalTextChanged).toBe(false);
  });

  it("a single pair text change highlights exactly that pair", () => {
    const a = baseRequest();
    const b = structuredClone(a);
    b.pairs[1]!.text = "wide leather belt";
    const diff = diffRequests(a, b);
    expect(diff.identical).toBe(false);
    expect(highlightedPairIndices(diff)).toEqual([1]);
    expect(diff.pairs[0]).toMatchObject({
      index: 1,
      presence: "both",
      textChanged: true,
      sketchChanged: false,
      textA: "belt",
      textB: "wide leather belt",
    });
  });

  it("sketch-only changes are flagged as sketch, not text", () => {
    const a = baseRequest();
    const b = structuredClone(a);
    const session = new Session(16, 16);
    const altered = session.addLayer("hood");
    altered.applyStroke(line(0, 15, 15, 15, 1));
    b.pairs[0]!.sketch = altered.exportSketchBase64();
    const diff = diffRequests(a, b);
    expect(highlightedPairIndices(diff)).toEqual([0]);
    expect(diff.pairs[0]).toMatchObject({ index: 0, textChanged: false, sketchChanged: true });
  });

  it("added and removed pairs are reported one-sided", () => {
    const a = baseRequest();
    const b = structuredClone(a);
    b.pairs.push({ sketch: a.pairs[0]!.sketch, text: "extra scarf" });
    const added = diffRequests(a, b);
    expect(added.pairs).toEqual([
      { index: 2, presence: "b-only", textChanged: false, sketchChanged: false, textA: null, textB: "extra scarf" },
    ]);
    const removed = diffRequests(b, a);
    expect(removed.pairs[0]!.presence).toBe("a-only");
  });

  it("knob changes are reported without touching pair diffs", () => {
    const a = baseRequest();
    const b = structuredClone(a);
    b.alpha = 1;
    b.seed = 4;
    b.global_text = "studio shot";
    const diff = diffRequests(a, b);
    expect(diff.identical).toBe(false);
    expect(diff.alphaChanged).toBe(true);
    expect(diff.seedChanged).toBe(true);
    expect(diff.globalTextChanged).toBe(true);
    expect(diff.pairs).toHaveLength(0);
  });
});

describe("alpha sweeps", () => {
  it("runs differing only in alpha group into one strip ordered by alpha", () => {
    const base = baseRequest();
    const alphas = [1, 0.25, 0, 0.75, 0.5];
    const runs = alphas.map((alpha) => ({
      request: { ...structuredClone(base), alpha },
      item: `run-a${alpha}`,
    }));
    const strips = alphaSweepStrips(runs);
    expect(strips).toHaveLength(1);
    expect(strips[0]!.map((s) => s.alpha)).toEqual([0, 0.25, 0.5, 0.75, 1]);
    expect(strips[0]!.map((s) => s.item)).toEqual(["run-a0", "run-a0.25", "run-a0.5", "run-a0.75", "run-a1"]);
  });

  it("any non-alpha difference splits the strip", () => {
    const base = baseRequest();
    const other = structuredClone(base);
    other.seed = 99;
    expect(sweepKey(base)).toBe(sweepKey(structuredClone(base)));
    expect(sweepKey(base)).not.toBe(sweepKey(other));
    const strips = alphaSweepStrips([
      { request: { ...structuredClone(base), alpha: 0 }, item: "a" },
      { request: { ...structuredClone(other), alpha: 1 }, item: "b" },
      { request: { ...structuredClone(base), alpha: 1 }, item: "c" },
    ]);
    expect(strips).toHaveLength(2);
    expect(strips[0]!.map((s) => s.item)).toEqual(["a", "c"]);
    expect(strips[1]!.map((s) => s.item)).toEqual(["b"]);
  });
});
