/** Editing session: ordered pair layers plus the request-level knobs.
 *
 * The session is the single source of truth for what a submission will
 * contain.  `buildRequest` turns it into a schema-valid generation request:
 * visible layers with text become sketch+text pairs (raster -> base64 PNG),
 * the alpha slider and seed lock map to their request fields, and the
 * canonical serialization of that request is what goes on the wire.
 *
 * Every submission appends a frozen history entry holding the canonical
 * request bytes and digests; replaying an entry returns those exact bytes, so
 * a run can always be re-issued or re-edited from history alone.
 */

import { canonicalJson, Json, requestDigest } from "./canonical.js";
import { DEFAULT_CANVAS_SIZE } from "./bitmap.js";
import { base64ToBytes } from "./base64.js";
import { generationRequestSchema, GenerationRequest, MAX_PAIRS } from "./schema.js";
import { layerFromPng, PairLayer } from "./layer.js";

export const DEFAULT_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"] as const;

export interface SeedLock {
  locked: boolean;
  value: number;
}

export interface HistoryEntry {
  /** Run id returned by the service. */
  readonly runId: string;
  /** Digest the service computed for the stored request. */
  readonly serverDigest: string;
  /** Digest of {@link requestJson}; equal entries mean equal requests. */
  readonly digest: string;
  /** Canonical request serialization; replay returns exactly these bytes. */
  readonly requestJson: string;
  readonly submittedAt: number;
}

export class Session {
  readonly canvasWidth: number;
  readonly canvasHeight: number;
  layers: PairLayer[] = [];
  globalText = "";
  /** Pair-conditioning strength; null defers to the service default. */
  alpha: number | null = 1.0;
  /** Sampler steps; null defers to the service default. */
  steps: number | null = null;
  seedLock: SeedLock = { locked: false, value: 0 };

  private historyEntries: HistoryEntry[] = [];
  private nextLayerId = 1;

  constructor(canvasWidth = DEFAULT_CANVAS_SIZE, canvasHeight = canvasWidth) {
    this.canvasWidth = canvasWidth;
    this.canvasHeight = canvasHeight;
  }

  get history(): readonly HistoryEntry[] {
    return this.historyEntries;
  }

  // -- layer management -------------------------------------------------

  addLayer(text = ""): PairLayer {
    if (this.layers.length >= MAX_PAIRS) {
      throw new RangeError(`at most ${MAX_PAIRS} pair layers are supported`);
    }
    const color = DEFAULT_PALETTE[this.layers.length % DEFAULT_PALETTE.length]!;
    const layer = new PairLayer(`layer-${this.nextLayerId++}`, this.canvasWidth, this.canvasHeight, color, text);
    this.layers.push(layer);
    return layer;
  }

  /** Re-import an exported sketch PNG as a new layer (sizes must match). */
  addLayerFromPng(bytes: Uint8Array, text = ""): PairLayer {
    if (this.layers.length >= MAX_PAIRS) {
      throw new RangeError(`at most ${MAX_PAIRS} pair layers are supported`);
    }
    const color = DEFAULT_PALETTE[this.layers.length % DEFAULT_PALETTE.length]!;
    const layer = layerFromPng(`layer-${this.nextLayerId++}`, bytes, color, text);
    if (layer.width !== this.canvasWidth || layer.height !== this.canvasHeight) {
      throw new RangeError(
        `imported sketch is ${layer.width}x${layer.height}, canvas is ${this.canvasWidth}x${this.canvasHeight}`,
      );
    }
    this.layers.push(layer);
    return layer;
  }

  getLayer(id: string): PairLayer | undefined {
    return this.layers.find((l) => l.id === id);
  }

  removeLayer(id: string): boolean {
    const index = this.layers.findIndex((l) => l.id === id);
    if (index < 0) return false;
    this.layers.splice(index, 1);
    return true;
  }

  /** Reorder a layer; pair order in the request follows layer order. */
  moveLayer(id: string, newIndex: number): void {
    const index = this.layers.findIndex((l) => l.id === id);
    if (index < 0) throw new RangeError(`no layer ${id}`);
    const clamped = Math.max(0, Math.min(this.layers.length - 1, newIndex));
    const [layer] = this.layers.splice(index, 1);
    this.layers.splice(clamped, 0, layer!);
  }

  // -- request knobs ------------------------------------------------------

  setGlobalText(text: string): void {
    this.globalText = text;
  }

  setAlpha(alpha: number | null): void {
    if (alpha !== null && (!Number.isFinite(alpha) || alpha < 0 || alpha > 1)) {
      throw new RangeError(`alpha must be in [0, 1], got ${alpha}`);
    }
    this.alpha = alpha;
  }

  setSteps(steps: number | null): void {
    if (steps !== null && (!Number.isInteger(steps) || steps < 1 || steps > 1000)) {
      throw new RangeError(`steps must be an integer in [1, 1000], got ${steps}`);
    }
    this.steps = steps;
  }

  lockSeed(value: number): void {
    if (!Number.isInteger(value)) throw new RangeError("seed must be an integer");
    this.seedLock = { locked: true, value };
  }

  unlockSeed(): void {
    this.seedLock = { ...this.seedLock, locked: false };
  }

  // -- request building --------------------------------------------------

  /** Layers that will be submitted: visible, with a non-empty text. */
  submittableLayers(): PairLayer[] {
    return this.layers.filter((l) => l.visible && l.text.trim().length > 0);
  }

  /** Build the generation request and check it against the wire schema. */
  buildRequest(): GenerationRequest {
    const request: GenerationRequest = {
      global_text: this.globalText.trim().length > 0 ? this.globalText : null,
      pairs: this.submittableLayers().map((layer) => ({
        sketch: layer.exportSketchBase64(),
        text: layer.text,
      })),
      alpha: this.alpha,
      steps: this.steps,
      seed: this.seedLock.locked ? this.seedLock.value : null,
    };
    return generationRequestSchema.parse(request);
  }

  /** Canonical bytes of {@link buildRequest}; this exact string is POSTed. */
  buildRequestJson(): string {
    return canonicalJson(this.buildRequest() as unknown as Json);
  }

  // -- history -------------------------------------------------------------

  recordSubmission(runId: string, serverDigest: string, requestJson: string): HistoryEntry {
    const entry: HistoryEntry = Object.freeze({
      runId,
      serverDigest,
      digest: requestDigest(JSON.parse(requestJson) as Json),
      requestJson,
      submittedAt: Date.now(),
    });
    this.historyEntries.push(entry);
    return entry;
  }

  /** Exact request bytes of a past submission. */
  replay(runId: string): string {
    const entry = this.historyEntries.find((e) => e.runId === runId);
    if (!entry) throw new RangeError(`no history entry for run ${runId}`);
    return entry.requestJson;
  }
}

/** Rebuild an editable session from a past request (one-click re-edit).
 * Pairs become layers with their rasters re-imported; the seed, alpha and
 * steps knobs are restored so resubmitting reproduces the request. */
export function sessionFromRequest(request: GenerationRequest): Session {
  const parsed = generationRequestSchema.parse(request);
  const sketches = parsed.pairs.map((p) => base64ToBytes(p.sketch));
  let width = DEFAULT_CANVAS_SIZE;
  let height = DEFAULT_CANVAS_SIZE;
  if (sketches.length > 0) {
    const probe = layerFromPng("probe", sketches[0]!);
    width = probe.width;
    height = probe.height;
  }
  const session = new Session(width, height);
  session.globalText = parsed.global_text ?? "";
  session.alpha = parsed.alpha;
  session.steps = parsed.steps;
  if (parsed.seed !== null) session.lockSeed(parsed.seed);
  for (let i = 0; i < parsed.pairs.length; i++) {
    session.addLayerFromPng(sketches[i]!, parsed.pairs[i]!.text);
  }
  return session;
}
