/** HTTP client for the studio service.
 *
 * All traffic goes through an injectable transport (a thin fetch wrapper in
 * the browser, a stub in tests), and every response body is parsed through
 * the wire schemas.  Failures are split into three kinds the UI treats
 * differently: validation errors carry a field path and are shown inline,
 * unavailability (network refusal or 503) raises the retry banner, and
 * anything else is a plain service error.
 */

import {
  Health,
  healthSchema,
  RunRecord,
  runRecordSchema,
  SubmitResponse,
  submitResponseSchema,
  validationDetailSchema,
} from "./schema.js";

export interface TransportRequest {
  method: "GET" | "POST";
  headers?: Record<string, string>;
  body?: string;
}

export interface TransportResponse {
  status: number;
  text(): Promise<string>;
}

export type Transport = (url: string, init: TransportRequest) => Promise<TransportResponse>;

/** Transport over the platform fetch; the default in the browser. */
export function fetchTransport(fetchImpl: typeof fetch = fetch): Transport {
  return async (url, init) => {
    const response = await fetchImpl(url, init);
    return { status: response.status, text: () => response.text() };
  };
}

// -- field paths for inline error display -------------------------------------

export type FieldPath =
  | { kind: "global_text" }
  | { kind: "alpha" }
  | { kind: "steps" }
  | { kind: "seed" }
  | { kind: "pairs" }
  | { kind: "pair"; index: number; field: "sketch" | "text" };

export interface FieldError {
  path: FieldPath;
  message: string;
}

/** Map a FastAPI error location like ["body","pairs",1,"sketch"] to the UI
 * field it belongs to.  Unknown locations return null and are shown globally. */
export function fieldPathFromLoc(loc: readonly (string | number)[]): FieldPath | null {
  const parts = loc[0] === "body" ? loc.slice(1) : loc.slice();
  const head = parts[0];
  if (head === "pairs") {
    if (parts.length === 1) return { kind: "pairs" };
    const index = parts[1];
    const field = parts[2];
    if (typeof index === "number" && (field === "sketch" || field === "text")) {
      return { kind: "pair", index, field };
    }
    return { kind: "pairs" };
  }
  if (head === "global_text") return { kind: "global_text" };
  if (head === "alpha") return { kind: "alpha" };
  if (head === "steps") return { kind: "steps" };
  if (head === "seed") return { kind: "seed" };
  return null;
}

// -- error taxonomy ------------------------------------------------------------

/** 422: the request was rejected field by field. */
export class ServiceValidationError extends Error {
  readonly fieldErrors: readonly FieldError[];

  constructor(fieldErrors: readonly FieldError[]) {
    super(fieldErrors.map((e) => e.message).join("; ") || "request rejected");
    this.name = "ServiceValidationError";
    this.fieldErrors = fieldErrors;
  }
}

/** The service cannot take work right now: network refusal or 503. */
export class ServiceUnavailableError extends Error {
  constructor(message: string, override readonly cause?: unknown) {
    super(message);
    this.name = "ServiceUnavailableError";
  }
}

/** Any other non-2xx answer. */
export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ServiceError";
  }
}

/** A run finished in a terminal non-success state. */
export class RunFailedError extends Error {
  constructor(readonly record: RunRecord) {
    super(record.error ?? `run ${record.run_id} ended as ${record.status}`);
    this.name = "RunFailedError";
  }
}

function parseJson(text: string): unknown {
  try {
    return JSON.parse(text);
  } catch {
    return null;
  }
}

// -- client --------------------------------------------------------------------

export interface PollOptions {
  /** First wait between polls; later waits grow by `factor` up to `maxDelayMs`. */
  initialDelayMs?: number;
  maxDelayMs?: number;
  factor?: number;
  timeoutMs?: number;
  sleep?: (ms: number) => Promise<void>;
  /** Called before each wait with (attempt, delayMs, record). */
  onTick?: (attempt: number, delayMs: number, record: RunRecord) => void;
}

const realSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class StudioClient {
  constructor(
    readonly baseUrl: string,
    private readonly transport: Transport,
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  private async request(method: "GET" | "POST", path: string, body?: string): Promise<unknown> {
    let response: TransportResponse;
    try {
      response = await this.transport(this.url(path), {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body,
      });
    } catch (cause) {
      throw new ServiceUnavailableError(`service unreachable at ${this.baseUrl}`, cause);
    }
    const text = await response.text();
    if (response.status === 422) {
      const detail = (parseJson(text) as { detail?: unknown } | null)?.detail;
      const parsed = validationDetailSchema.safeParse(detail);
      const fieldErrors: FieldError[] = parsed.success
        ? parsed.data.map((d) => ({ path: fieldPathFromLoc(d.loc) ?? { kind: "pairs" }, message: d.msg }))
        : [{ path: { kind: "pairs" }, message: text }];
      throw new ServiceValidationError(fieldErrors);
    }
    if (response.status === 503) {
      throw new ServiceUnavailableError(`service returned 503: ${text}`);
    }
    if (response.status >= 400) {
      throw new ServiceError(response.status, text);
    }
    return parseJson(text);
  }

  async health(): Promise<Health> {
    return healthSchema.parse(await this.request("GET", "/health"));
  }

  /** POST the exact canonical request bytes. */
  async submit(requestJson: string): Promise<SubmitResponse> {
    return submitResponseSchema.parse(await this.request("POST", "/generate", requestJson));
  }

  async getRun(runId: string): Promise<RunRecord> {
    return runRecordSchema.parse(await this.request("GET", `/runs/${runId}`));
  }

  async listRuns(): Promise<RunRecord[]> {
    const body = (await this.request("GET", "/runs")) as { runs?: unknown[] };
    return (body.runs ?? []).map((r) => runRecordSchema.parse(r));
  }

  async listCheckpoints(): Promise<{ checkpoints: string[]; active: string | null }> {
    return (await this.request("GET", "/checkpoints")) as { checkpoints: string[]; active: string | null };
  }

  async loadCheckpoint(id: string): Promise<string> {
    const body = (await this.request("POST", `/checkpoints/${id}/load`)) as { active: string };
    return body.active;
  }

  /** Poll a run until it reaches a terminal state, waiting longer each time. */
  async pollUntilDone(runId: string, options: PollOptions = {}): Promise<RunRecord> {
    const initial = options.initialDelayMs ?? 250;
    const max = options.maxDelayMs ?? 4000;
    const factor = options.factor ?? 2;
    const timeout = options.timeoutMs ?? 120_000;
    const sleep = options.sleep ?? realSleep;

    let delay = initial;
    let waited = 0;
    for (let attempt = 0; ; attempt++) {
      const record = await this.getRun(runId);
      if (record.status === "done") return record;
      if (record.status === "failed" || record.status === "interrupted") {
        throw new RunFailedError(record);
      }
      if (waited >= timeout) {
        throw new ServiceError(408, `run ${runId} still ${record.status} after ${waited} ms`);
      }
      options.onTick?.(attempt, delay, record);
      await sleep(delay);
      waited += delay;
      delay = Math.min(Math.round(delay * factor), max);
    }
  }
}
