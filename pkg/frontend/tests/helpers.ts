/** Shared test utilities: a seeded PRNG, random session walks, and stroke
 * shorthand.  Randomized tests derive everything from an explicit seed so a
 * failure reproduces exactly. */

import { PairLayer } from "../src/core/layer.js";
import { Session } from "../src/core/session.js";
import { makeStroke, Stroke, StrokePoint } from "../src/core/strokes.js";
import { MAX_PAIRS } from "../src/core/schema.js";

/** Deterministic 32-bit PRNG (mulberry32). */
export function prng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function randInt(rand: () => number, lo: number, hi: number): number {
  return lo + Math.floor(rand() * (hi - lo + 1));
}

export function pick<T>(rand: () => number, items: readonly T[]): T {
  return items[Math.floor(rand() * items.length)]!;
}

export function randomStroke(rand: () => number, width: number, height: number): Stroke {
  const points: StrokePoint[] = [];
  const n = randInt(rand, 1, 6);
  for (let i = 0; i < n; i++) {
    points.push({ x: randInt(rand, 0, width - 1), y: randInt(rand, 0, height - 1) });
  }
  return makeStroke(points, randInt(rand, 0, 3), rand() < 0.15 ? "erase" : "draw");
}

export function line(x0: number, y0: number, x1: number, y1: number, radius = 0): Stroke {
  return makeStroke(
    [
      { x: x0, y: y0 },
      { x: x1, y: y1 },
    ],
    radius,
  );
}

const WORDS = ["red", "hood", "denim", "sleeve", "collar", "pleated", "skirt", "belt", "jacket", "floral"];

export function randomText(rand: () => number): string {
  const n = randInt(rand, 1, 3);
  const words: string[] = [];
  for (let i = 0; i < n; i++) words.push(pick(rand, WORDS));
  return words.join(" ");
}

/** Drive a session through a random but reachable sequence of UI actions.
 * Every action here corresponds to something a user can do in the editor. */
export function randomSession(seed: number, canvas = 32, ops = 40): Session {
  const rand = prng(seed);
  const session = new Session(canvas, canvas);
  const actions: ((layer: PairLayer | undefined) => void)[] = [
    () => {
      if (session.layers.length < MAX_PAIRS) session.addLayer(randomText(rand));
    },
    (layer) => layer?.applyStroke(randomStroke(rand, canvas, canvas)),
    (layer) => layer?.setText(rand() < 0.2 ? "" : randomText(rand)),
    (layer) => layer?.toggleVisible(),
    (layer) => layer?.clear(),
    (layer) => void layer?.undo(),
    (layer) => void layer?.redo(),
    (layer) => {
      if (layer && rand() < 0.5) session.removeLayer(layer.id);
    },
    () => session.setGlobalText(rand() < 0.3 ? "" : randomText(rand)),
    () => session.setAlpha(rand() < 0.2 ? null : Math.round(rand() * 100) / 100),
    () => session.setSteps(rand() < 0.5 ? null : randInt(rand, 1, 1000)),
    () => (rand() < 0.5 ? session.lockSeed(randInt(rand, 0, 2 ** 31 - 1)) : session.unlockSeed()),
    (layer) => {
      if (layer) session.moveLayer(layer.id, randInt(rand, 0, session.layers.length - 1));
    },
  ];
  for (let i = 0; i < ops; i++) {
    const layer = session.layers.length > 0 ? pick(rand, session.layers) : undefined;
    pick(rand, actions)(layer);
  }
  return session;
}
