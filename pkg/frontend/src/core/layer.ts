/** One sketch+text pair as edited in the UI.
 *
 * A layer owns a binary bitmap at exactly the canvas resolution, exactly one
 * text, a color tag used to tint its strokes on screen, and a visibility
 * flag.  Strokes are kept as vectors for display, but every edit burns them
 * into the bitmap: what gets submitted is always the raster, never the
 * vectors.
 *
 * Bitmap edits (strokes, clears, imports) move through a bounded undo/redo
 * history.  Undo restores the exact prior raster, bit for bit.
 */

import { Bitmap, bitmapFromGray, bitmapToGray, clearBitmap, cloneBitmap, countInk, createBitmap } from "./bitmap.js";
import { bytesToBase64 } from "./base64.js";
import { decodePng, encodeGrayPng, firstChannel } from "./png.js";
import { rasterizeStroke, Stroke } from "./strokes.js";

/** Undo depth per layer.  Anything from the last 64 edits can be restored. */
export const UNDO_CAPACITY = 64;

interface Snapshot {
  readonly data: Uint8Array;
  readonly strokes: readonly Stroke[];
}

export class PairLayer {
  readonly id: string;
  text: string;
  colorTag: string;
  visible = true;
  bitmap: Bitmap;
  strokes: Stroke[] = [];

  private undoStack: Snapshot[] = [];
  private redoStack: Snapshot[] = [];

  constructor(id: string, width: number, height: number, colorTag = "#1f77b4", text = "") {
    this.id = id;
    this.text = text;
    this.colorTag = colorTag;
    this.bitmap = createBitmap(width, height);
  }

  get width(): number {
    return this.bitmap.width;
  }

  get height(): number {
    return this.bitmap.height;
  }

  isBlank(): boolean {
    return countInk(this.bitmap) === 0;
  }

  private snapshot(): Snapshot {
    return { data: this.bitmap.data.slice(), strokes: this.strokes.slice() };
  }

  private restore(snap: Snapshot): void {
    this.bitmap.data.set(snap.data);
    this.strokes = snap.strokes.slice();
  }

  private pushUndo(): void {
    this.undoStack.push(this.snapshot());
    if (this.undoStack.length > UNDO_CAPACITY) this.undoStack.shift();
    this.redoStack.length = 0;
  }

  /** Burn a finished stroke into the raster.  One undo step per stroke. */
  applyStroke(stroke: Stroke): void {
    this.pushUndo();
    this.strokes.push(stroke);
    rasterizeStroke(this.bitmap, stroke);
  }

  applyStrokes(strokes: readonly Stroke[]): void {
    for (const s of strokes) this.applyStroke(s);
  }

  /** Reset the raster to all zeros (one undoable step). */
  clear(): void {
    this.pushUndo();
    this.strokes.length = 0;
    clearBitmap(this.bitmap);
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  undo(): boolean {
    const snap = this.undoStack.pop();
    if (!snap) return false;
    this.redoStack.push(this.snapshot());
    this.restore(snap);
    return true;
  }

  redo(): boolean {
    const snap = this.redoStack.pop();
    if (!snap) return false;
    this.undoStack.push(this.snapshot());
    this.restore(snap);
    return true;
  }

  setText(text: string): void {
    this.text = text;
  }

  setVisible(visible: boolean): void {
    this.visible = visible;
  }

  toggleVisible(): void {
    this.visible = !this.visible;
  }

  setColorTag(colorTag: string): void {
    this.colorTag = colorTag;
  }

  /** PNG bytes of the raster (grayscale, ink=255).  Deterministic. */
  exportPng(): Uint8Array {
    return encodeGrayPng(this.bitmap.width, this.bitmap.height, bitmapToGray(this.bitmap));
  }

  /** Base64 of {@link exportPng}, the exact string submitted as `sketch`. */
  exportSketchBase64(): string {
    return bytesToBase64(this.exportPng());
  }

  /** Replace the raster with a decoded PNG (one undoable step).
   * The PNG must match the layer's canvas resolution. */
  importPng(bytes: Uint8Array): void {
    const decoded = decodePng(bytes);
    if (decoded.width !== this.bitmap.width || decoded.height !== this.bitmap.height) {
      throw new RangeError(
        `PNG is ${decoded.width}x${decoded.height}, layer canvas is ${this.bitmap.width}x${this.bitmap.height}`,
      );
    }
    this.pushUndo();
    this.strokes.length = 0;
    this.bitmap = bitmapFromGray(decoded.width, decoded.height, firstChannel(decoded));
  }

  /** Deep copy (history does not carry over). */
  cloneShallowHistory(): PairLayer {
    const copy = new PairLayer(this.id, this.width, this.height, this.colorTag, this.text);
    copy.visible = this.visible;
    copy.bitmap = cloneBitmap(this.bitmap);
    copy.strokes = this.strokes.slice();
    return copy;
  }
}

/** Build a layer directly from PNG bytes, e.g. when re-importing an export. */
export function layerFromPng(id: string, bytes: Uint8Array, colorTag?: string, text = ""): PairLayer {
  const decoded = decodePng(bytes);
  const layer = new PairLayer(id, decoded.width, decoded.height, colorTag ?? "#1f77b4", text);
  layer.bitmap = bitmapFromGray(decoded.width, decoded.height, firstChannel(decoded));
  return layer;
}
