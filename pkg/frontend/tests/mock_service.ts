/** In-memory stand-in for the studio service, speaking its exact HTTP
 * contract: same endpoints, same validation error locations, same run record
 * fields.  Used by tests that script the UI without a live backend.
 *
 * Failure modes are switchable so tests can exercise the retry banner
 * (`down`, `unavailable`) and failed runs (`failRuns`).
 */

import { Transport, TransportRequest, TransportResponse } from "../src/core/client.js";
import { Json, requestDigest } from "../src/core/canonical.js";
import { base64ToBytes, bytesToBase64 } from "../src/core/base64.js";
import { decodePng, encodeGrayPng } from "../src/core/png.js";

interface MockRun {
  run_id: string;
  status: "pending" | "running" | "done" | "failed";
  request: unknown;
  digest: string;
  seed: number;
  checkpoint_id: string;
  created_at: number;
  pollsBeforeDone: number;
  polls: number;
  image_base64?: string;
  error?: string;
}

export class MockService {
  /** Simulate the process being down: transport throws like fetch does. */
  down = false;
  /** Simulate 503 (no checkpoint loaded). */
  unavailable = false;
  /** Make accepted runs end in `failed`. */
  failRuns = false;
  /** How many polls a run stays pending/running before finishing. */
  pollsBeforeDone = 2;
  maxPairs = 6;
  canvas = 512;

  readonly runs = new Map<string, MockRun>();
  submissions = 0;
  private nextId = 1;
  private seedCounter = 1000;

  transport(): Transport {
    return async (url, init) => this.handle(url, init);
  }

  private async handle(url: string, init: TransportRequest): Promise<TransportResponse> {
    if (this.down) throw new TypeError("fetch failed: connection refused");
    const path = new URL(url, "http://mock").pathname;
    if (init.method === "POST" && path === "/generate") return this.generate(init.body ?? "");
    const runMatch = path.match(/^\/runs\/([^/]+)$/);
    if (init.method === "GET" && runMatch) return this.getRun(runMatch[1]!);
    if (init.method === "GET" && path === "/runs") {
      return json(200, { runs: [...this.runs.values()].map((r) => ({ ...publicRecord(r), request: undefined })) });
    }
    if (init.method === "GET" && path === "/health") {
      return json(200, {
        status: "ok",
        model_loaded: !this.unavailable,
        active_checkpoint: this.unavailable ? null : "toy",
        queue_depth: 0,
      });
    }
    return json(404, { detail: `no route ${path}` });
  }

  private generate(body: string): TransportResponse {
    let payload: Record<string, unknown>;
    try {
      payload = JSON.parse(body) as Record<string, unknown>;
    } catch {
      return json(422, { detail: [{ loc: ["body"], msg: "invalid JSON", type: "value_error" }] });
    }
    const fieldError = validatePayload(payload, this.maxPairs);
    if (fieldError) return json(422, { detail: [fieldError] });
    if (this.unavailable) return json(503, { detail: "no checkpoint loaded" });

    this.submissions++;
    const runId = `mock-${this.nextId++}`;
    const seed = typeof payload.seed === "number" ? payload.seed : this.seedCounter++;
    const run: MockRun = {
      run_id: runId,
      status: "pending",
      request: payload,
      digest: requestDigest(payload as Json),
      seed,
      checkpoint_id: "toy",
      created_at: Date.now() / 1000,
      pollsBeforeDone: this.pollsBeforeDone,
      polls: 0,
    };
    this.runs.set(runId, run);
    return json(202, { run_id: runId, status: "pending", digest: run.digest });
  }

  private getRun(runId: string): TransportResponse {
    const run = this.runs.get(runId);
    if (!run) return json(404, { detail: `unknown run ${runId}` });
    if (run.status === "pending" || run.status === "running") {
      run.polls++;
      if (run.polls > run.pollsBeforeDone) {
        if (this.failRuns) {
          run.status = "failed";
          run.error = "sampler exploded";
        } else {
          run.status = "done";
          run.image_base64 = bytesToBase64(this.renderImage(run.seed));
        }
      } else {
        run.status = "running";
      }
    }
    return json(200, publicRecord(run));
  }

  /** Deterministic stand-in image: seed-keyed grayscale at canvas size. */
  private renderImage(seed: number): Uint8Array {
    const gray = new Uint8Array(this.canvas * this.canvas);
    let state = seed >>> 0 || 1;
    for (let i = 0; i < gray.length; i++) {
      state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
      gray[i] = state >>> 24;
    }
    return encodeGrayPng(this.canvas, this.canvas, gray);
  }
}

function publicRecord(run: MockRun): Record<string, unknown> {
  const { pollsBeforeDone: _p, polls: _q, ...rest } = run;
  return rest;
}

function json(status: number, body: unknown): TransportResponse {
  return { status, text: async () => JSON.stringify(body) };
}

/** The validation rules of the real /generate endpoint, expressed
 * independently of the UI's own schema code. */
function validatePayload(payload: Record<string, unknown>, maxPairs: number): Record<string, unknown> | null {
  const pairs = payload.pairs;
  if (!Array.isArray(pairs)) {
    return { loc: ["body", "pairs"], msg: "value is not a valid list", type: "type_error" };
  }
  if (pairs.length > maxPairs) {
    return { loc: ["body", "pairs"], msg: `at most ${maxPairs} pairs supported`, type: "value_error" };
  }
  for (let i = 0; i < pairs.length; i++) {
    const pair = pairs[i] as Record<string, unknown>;
    if (typeof pair.text !== "string" || pair.text.length < 1) {
      return { loc: ["body", "pairs", i, "text"], msg: "string should have at least 1 character", type: "value_error" };
    }
    if (typeof pair.sketch !== "string") {
      return { loc: ["body", "pairs", i, "sketch"], msg: "field required", type: "value_error" };
    }
    try {
      decodePng(base64ToBytes(pair.sketch));
    } catch {
      return { loc: ["body", "pairs", i, "sketch"], msg: "not a decodable base64 PNG", type: "value_error" };
    }
  }
  const alpha = payload.alpha;
  if (alpha !== null && alpha !== undefined && (typeof alpha !== "number" || alpha < 0 || alpha > 1)) {
    return { loc: ["body", "alpha"], msg: "input should be less than or equal to 1", type: "value_error" };
  }
  const steps = payload.steps;
  if (steps !== null && steps !== undefined && (typeof steps !== "number" || !Number.isInteger(steps) || steps < 1 || steps > 1000)) {
    return { loc: ["body", "steps"], msg: "input should be a valid integer between 1 and 1000", type: "value_error" };
  }
  const seed = payload.seed;
  if (seed !== null && seed !== undefined && (typeof seed !== "number" || !Number.isInteger(seed))) {
    return { loc: ["body", "seed"], msg: "input should be a valid integer", type: "value_error" };
  }
  const globalText = payload.global_text;
  if (globalText !== null && globalText !== undefined && typeof globalText !== "string") {
    return { loc: ["body", "global_text"], msg: "input should be a valid string", type: "value_error" };
  }
  return null;
}
