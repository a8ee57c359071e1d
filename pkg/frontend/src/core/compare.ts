/** Comparing runs: per-pair diffs and alpha sweep strips.
 *
 * A diff lists only what differs, so comparing a request with itself yields
 * an empty diff.  Pairs are matched by position (pair order is meaningful to
 * the model); a pair present on one side only is reported as added/removed.
 *
 * Runs that differ only in alpha form a sweep: the strip view orders them by
 * alpha so the conditioning strength reads left to right.
 */

import { canonicalJson, Json } from "./canonical.js";
import { GenerationRequest } from "./schema.js";

export interface PairDiff {
  readonly index: number;
  /** "a-only" / "b-only" when the pair exists on one side. */
  readonly presence: "both" | "a-only" | "b-only";
  readonly textChanged: boolean;
  readonly sketchChanged: boolean;
  readonly textA: string | null;
  readonly textB: string | null;
}

export interface RequestDiff {
  readonly identical: boolean;
  readonly globalTextChanged: boolean;
  readonly alphaChanged: boolean;
  readonly stepsChanged: boolean;
  readonly seedChanged: boolean;
  /** Only pairs that differ; empty when all pairs match. */
  readonly pairs: readonly PairDiff[];
}

export function diffRequests(a: GenerationRequest, b: GenerationRequest): RequestDiff {
  const pairs: PairDiff[] = [];
  const count = Math.max(a.pairs.length, b.pairs.length);
  for (let i = 0; i < count; i++) {
    const pa = a.pairs[i];
    const pb = b.pairs[i];
    if (pa && pb) {
      const textChanged = pa.text !== pb.text;
      const sketchChanged = pa.sketch !== pb.sketch;
      if (textChanged || sketchChanged) {
        pairs.push({ index: i, presence: "both", textChanged, sketchChanged, textA: pa.text, textB: pb.text });
      }
    } else {
      pairs.push({
        index: i,
        presence: pa ? "a-only" : "b-only",
        textChanged: false,
        sketchChanged: false,
        textA: pa?.text ?? null,
        textB: pb?.text ?? null,
      });
    }
  }
  const diff = {
    globalTextChanged: (a.global_text ?? null) !== (b.global_text ?? null),
    alphaChanged: (a.alpha ?? null) !== (b.alpha ?? null),
    stepsChanged: (a.steps ?? null) !== (b.steps ?? null),
    seedChanged: (a.seed ?? null) !== (b.seed ?? null),
    pairs,
  };
  const identical =
    !diff.globalTextChanged && !diff.alphaChanged && !diff.stepsChanged && !diff.seedChanged && pairs.length === 0;
  return { identical, ...diff };
}

/** Indices of pairs a side-by-side view should highlight. */
export function highlightedPairIndices(diff: RequestDiff): number[] {
  return diff.pairs.map((p) => p.index);
}

/** Key shared by all requests of one alpha sweep: everything but alpha. */
export function sweepKey(request: GenerationRequest): string {
  const rest: Record<string, Json> = {
    global_text: request.global_text,
    pairs: request.pairs.map((p) => ({ sketch: p.sketch, text: p.text })),
    steps: request.steps,
    seed: request.seed,
  };
  return canonicalJson(rest);
}

export interface SweepItem<T> {
  readonly alpha: number | null;
  readonly item: T;
}

/** Group runs into alpha sweeps and order each strip by ascending alpha.
 * Runs whose requests differ in anything but alpha land in different strips. */
export function alphaSweepStrips<T>(runs: readonly { request: GenerationRequest; item: T }[]): SweepItem<T>[][] {
  const groups = new Map<string, SweepItem<T>[]>();
  const order: string[] = [];
  for (const run of runs) {
    const key = sweepKey(run.request);
    let strip = groups.get(key);
    if (!strip) {
      strip = [];
      groups.set(key, strip);
      order.push(key);
    }
    strip.push({ alpha: run.request.alpha, item: run.item });
  }
  for (const strip of groups.values()) {
    strip.sort((x, y) => (x.alpha ?? -1) - (y.alpha ?? -1));
  }
  return order.map((key) => groups.get(key)!);
}
