/** Finished runs, each pinned to the exact request that produced it.
 *
 * A gallery entry keeps the canonical request bytes alongside the returned
 * image, so "re-edit" can rebuild an editing session that resubmits
 * byte-identically -- optionally locking in the seed the service actually
 * used, which makes the rerun reproduce the image.
 */

import { base64ToBytes } from "./base64.js";
import { GenerationRequest, generationRequestSchema, RunRecord } from "./schema.js";
import { Session, sessionFromRequest } from "./session.js";

export interface GalleryEntry {
  readonly runId: string;
  /** Digest the service stored for this request. */
  readonly serverDigest: string;
  /** Canonical request bytes as submitted. */
  readonly requestJson: string;
  readonly request: GenerationRequest;
  /** Seed the run actually used (assigned by the service when unlocked). */
  readonly seed: number | null;
  readonly imagePng: Uint8Array;
  readonly record: RunRecord;
}

export class Gallery {
  private items: GalleryEntry[] = [];

  get entries(): readonly GalleryEntry[] {
    return this.items;
  }

  /** Register a finished run.  The record must be in `done` state with its
   * image inline. */
  addCompletedRun(requestJson: string, record: RunRecord): GalleryEntry {
    if (record.status !== "done") {
      throw new Error(`run ${record.run_id} is ${record.status}, not done`);
    }
    if (!record.image_base64) {
      throw new Error(`run ${record.run_id} has no inline image`);
    }
    const entry: GalleryEntry = Object.freeze({
      runId: record.run_id,
      serverDigest: record.digest ?? "",
      requestJson,
      request: generationRequestSchema.parse(JSON.parse(requestJson)),
      seed: record.seed ?? null,
      imagePng: base64ToBytes(record.image_base64),
      record,
    });
    this.items.push(entry);
    return entry;
  }

  byRun(runId: string): GalleryEntry | undefined {
    return this.items.find((e) => e.runId === runId);
  }

  /** One-click re-edit: a fresh session preloaded with the entry's request.
   * With `lockActualSeed` the session pins the seed the run used, so an
   * unmodified resubmission regenerates the same image. */
  reEdit(runId: string, options: { lockActualSeed?: boolean } = {}): Session {
    const entry = this.byRun(runId);
    if (!entry) throw new RangeError(`no gallery entry for run ${runId}`);
    const session = sessionFromRequest(entry.request);
    if (options.lockActualSeed && entry.seed !== null) {
      session.lockSeed(entry.seed);
    }
    return session;
  }
}
