/** Binary raster backing a sketch layer.
 *
 * Values are strictly 0 or 1, row-major, height x width.  The canvas
 * resolution is fixed at construction and every operation preserves it, so a
 * layer always rasterizes at exactly the resolution the service expects.
 */

export interface Bitmap {
  readonly width: number;
  readonly height: number;
  /** Row-major 0/1 bytes, length = width * height. */
  readonly data: Uint8Array;
}

export const DEFAULT_CANVAS_SIZE = 512;

export function createBitmap(width: number, height: number): Bitmap {
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new RangeError(`bitmap dimensions must be positive integers, got ${width}x${height}`);
  }
  return { width, height, data: new Uint8Array(width * height) };
}

export function cloneBitmap(bitmap: Bitmap): Bitmap {
  return { width: bitmap.width, height: bitmap.height, data: bitmap.data.slice() };
}

export function clearBitmap(bitmap: Bitmap): void {
  bitmap.data.fill(0);
}

export function getPixel(bitmap: Bitmap, x: number, y: number): number {
  if (x < 0 || y < 0 || x >= bitmap.width || y >= bitmap.height) return 0;
  return bitmap.data[y * bitmap.width + x] ?? 0;
}

export function setPixel(bitmap: Bitmap, x: number, y: number, value: 0 | 1): void {
  if (x < 0 || y < 0 || x >= bitmap.width || y >= bitmap.height) return;
  bitmap.data[y * bitmap.width + x] = value;
}

export function bitmapsEqual(a: Bitmap, b: Bitmap): boolean {
  if (a.width !== b.width || a.height !== b.height) return false;
  if (a.data.length !== b.data.length) return false;
  for (let i = 0; i < a.data.length; i++) {
    if (a.data[i] !== b.data[i]) return false;
  }
  return true;
}

export function countInk(bitmap: Bitmap): number {
  let n = 0;
  for (let i = 0; i < bitmap.data.length; i++) n += bitmap.data[i]!;
  return n;
}

/** Rebuild a bitmap from grayscale bytes using the service's >=128 threshold. */
export function bitmapFromGray(width: number, height: number, bytes: Uint8Array): Bitmap {
  if (bytes.length !== width * height) {
    throw new RangeError(`expected ${width * height} bytes for ${width}x${height}, got ${bytes.length}`);
  }
  const data = new Uint8Array(bytes.length);
  for (let i = 0; i < bytes.length; i++) data[i] = bytes[i]! >= 128 ? 1 : 0;
  return { width, height, data };
}

/** Grayscale view of a binary bitmap: ink pixels become 255, background 0. */
export function bitmapToGray(bitmap: Bitmap): Uint8Array {
  const out = new Uint8Array(bitmap.data.length);
  for (let i = 0; i < bitmap.data.length; i++) out[i] = bitmap.data[i] ? 255 : 0;
  return out;
}
