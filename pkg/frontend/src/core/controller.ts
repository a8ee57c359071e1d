/** Submission workflow: one in-flight run, inline errors, retry banner.
 *
 * The controller owns the glue between session, client and gallery.  At most
 * one submission is in flight; further submit calls while a run is pending
 * are rejected without touching the service.  Validation failures land in
 * `fieldErrors` next to the offending field, connectivity failures raise the
 * retry banner -- in both cases the session is left untouched, so nothing the
 * user drew or typed is lost.
 */

import { FieldError, RunFailedError, ServiceUnavailableError, ServiceValidationError, StudioClient, PollOptions } from "./client.js";
import { Gallery, GalleryEntry } from "./gallery.js";
import { Session } from "./session.js";
import { ZodError } from "zod";
import { fieldPathFromLoc } from "./client.js";

export type Banner = { kind: "retry"; message: string } | { kind: "error"; message: string } | null;

export type SubmitOutcome =
  | { ok: true; entry: GalleryEntry }
  | { ok: false; reason: "in-flight" | "validation" | "unavailable" | "failed" | "error" };

export class SubmitController {
  readonly gallery = new Gallery();
  fieldErrors: FieldError[] = [];
  banner: Banner = null;
  private current: Promise<SubmitOutcome> | null = null;

  constructor(
    readonly session: Session,
    readonly client: StudioClient,
    private readonly pollOptions: PollOptions = {},
  ) {}

  get inFlight(): boolean {
    return this.current !== null;
  }

  clearBanner(): void {
    this.banner = null;
  }

  /** Submit the current session.  Resolves once the run reaches a terminal
   * state and (on success) its image is in the gallery. */
  async submit(): Promise<SubmitOutcome> {
    if (this.current) return { ok: false, reason: "in-flight" };
    const task = this.run();
    this.current = task;
    try {
      return await task;
    } finally {
      this.current = null;
    }
  }

  /** Re-submit the exact bytes of a past run from session history. */
  async resubmit(runId: string): Promise<SubmitOutcome> {
    if (this.current) return { ok: false, reason: "in-flight" };
    const task = this.runJson(this.session.replay(runId));
    this.current = task;
    try {
      return await task;
    } finally {
      this.current = null;
    }
  }

  private async run(): Promise<SubmitOutcome> {
    let requestJson: string;
    try {
      requestJson = this.session.buildRequestJson();
    } catch (err) {
      // Client-side schema rejection: surface without a server round trip.
      this.fieldErrors = err instanceof ZodError ? zodFieldErrors(err) : [{ path: { kind: "pairs" }, message: String(err) }];
      return { ok: false, reason: "validation" };
    }
    return this.runJson(requestJson);
  }

  private async runJson(requestJson: string): Promise<SubmitOutcome> {
    this.fieldErrors = [];
    this.banner = null;
    try {
      const accepted = await this.client.submit(requestJson);
      this.session.recordSubmission(accepted.run_id, accepted.digest, requestJson);
      const record = await this.client.pollUntilDone(accepted.run_id, this.pollOptions);
      const entry = this.gallery.addCompletedRun(requestJson, record);
      return { ok: true, entry };
    } catch (err) {
      if (err instanceof ServiceValidationError) {
        this.fieldErrors = err.fieldErrors.slice();
        return { ok: false, reason: "validation" };
      }
      if (err instanceof ServiceUnavailableError) {
        this.banner = { kind: "retry", message: `${err.message} — your sketch is safe, retry when the service is back` };
        return { ok: false, reason: "unavailable" };
      }
      if (err instanceof RunFailedError) {
        this.banner = { kind: "error", message: err.message };
        return { ok: false, reason: "failed" };
      }
      this.banner = { kind: "error", message: err instanceof Error ? err.message : String(err) };
      return { ok: false, reason: "error" };
    }
  }
}

function zodFieldErrors(err: ZodError): FieldError[] {
  return err.issues.map((issue) => ({
    path: fieldPathFromLoc(issue.path.filter((p): p is string | number => typeof p !== "symbol")) ?? { kind: "pairs" },
    message: issue.message,
  }));
}
