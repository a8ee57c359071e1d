/** Freehand strokes and their rasterization.
 *
 * A stroke is the vector record of one pointer gesture: ordered canvas
 * coordinates plus a brush radius.  Strokes stay vectors while editing (so
 * they can be replayed onto any state) and are burned into the layer's binary
 * bitmap for submission.  Rasterization is pure integer math, so the same
 * stroke always produces the same pixels.
 */

import { Bitmap, setPixel } from "./bitmap.js";

export interface StrokePoint {
  readonly x: number;
  readonly y: number;
}

export interface Stroke {
  readonly points: readonly StrokePoint[];
  /** Brush radius in pixels; 0 means single-pixel lines. */
  readonly radius: number;
  /** Draw adds ink, erase removes it. */
  readonly mode: "draw" | "erase";
}

export function makeStroke(points: readonly StrokePoint[], radius = 1, mode: "draw" | "erase" = "draw"): Stroke {
  if (points.length === 0) throw new RangeError("a stroke needs at least one point");
  if (radius < 0) throw new RangeError("stroke radius must be >= 0");
  const snapped = points.map((p) => ({ x: Math.round(p.x), y: Math.round(p.y) }));
  return { points: snapped, radius: Math.round(radius), mode };
}

function stampDisc(bitmap: Bitmap, cx: number, cy: number, radius: number, value: 0 | 1): void {
  if (radius <= 0) {
    setPixel(bitmap, cx, cy, value);
    return;
  }
  const r2 = radius * radius;
  for (let dy = -radius; dy <= radius; dy++) {
    for (let dx = -radius; dx <= radius; dx++) {
      if (dx * dx + dy * dy <= r2) setPixel(bitmap, cx + dx, cy + dy, value);
    }
  }
}

function stampLine(bitmap: Bitmap, x0: number, y0: number, x1: number, y1: number, radius: number, value: 0 | 1): void {
  // Bresenham walk; a brush disc is stamped at every visited cell.
  let dx = Math.abs(x1 - x0);
  let dy = -Math.abs(y1 - y0);
  const sx = x0 < x1 ? 1 : -1;
  const sy = y0 < y1 ? 1 : -1;
  let err = dx + dy;
  let x = x0;
  let y = y0;
  for (;;) {
    stampDisc(bitmap, x, y, radius, value);
    if (x === x1 && y === y1) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

/** Burn one stroke into the bitmap in place. */
export function rasterizeStroke(bitmap: Bitmap, stroke: Stroke): void {
  const value: 0 | 1 = stroke.mode === "erase" ? 0 : 1;
  const pts = stroke.points;
  if (pts.length === 1) {
    const p = pts[0]!;
    stampDisc(bitmap, p.x, p.y, stroke.radius, value);
    return;
  }
  for (let i = 1; i < pts.length; i++) {
    const a = pts[i - 1]!;
    const b = pts[i]!;
    stampLine(bitmap, a.x, a.y, b.x, b.y, stroke.radius, value);
  }
}

export function rasterizeStrokes(bitmap: Bitmap, strokes: readonly Stroke[]): void {
  for (const s of strokes) rasterizeStroke(bitmap, s);
}
