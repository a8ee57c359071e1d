/** Wire types for the studio service, kept in lockstep with its HTTP surface.
 *
 * Every request the UI emits is parsed through these schemas before it goes
 * on the wire, so a schema violation is caught client-side with a field path
 * instead of a server round trip.
 */

import { z } from "zod";

/** Hard cap the service enforces on pairs per request. */
export const MAX_PAIRS = 6;

export const pairPayloadSchema = z.object({
  /** base64-encoded grayscale PNG at canvas resolution */
  sketch: z.string().min(1),
  text: z.string().min(1),
});

export const generationRequestSchema = z.object({
  global_text: z.string().nullable(),
  pairs: z.array(pairPayloadSchema).max(MAX_PAIRS),
  alpha: z.number().min(0).max(1).nullable(),
  steps: z.number().int().min(1).max(1000).nullable(),
  seed: z.number().int().nullable(),
});

export type PairPayload = z.infer<typeof pairPayloadSchema>;
export type GenerationRequest = z.infer<typeof generationRequestSchema>;

export const runStatusSchema = z.enum(["pending", "running", "done", "failed", "interrupted"]);
export type RunStatus = z.infer<typeof runStatusSchema>;

export const submitResponseSchema = z.object({
  run_id: z.string(),
  status: runStatusSchema,
  digest: z.string(),
});
export type SubmitResponse = z.infer<typeof submitResponseSchema>;

export const runRecordSchema = z
  .object({
    run_id: z.string(),
    status: runStatusSchema,
    digest: z.string().optional(),
    seed: z.number().int().optional(),
    checkpoint_id: z.string().nullable().optional(),
    request: generationRequestSchema.optional(),
    image: z.string().optional(),
    image_base64: z.string().optional(),
    error: z.string().optional(),
    created_at: z.number().optional(),
    started_at: z.number().optional(),
    finished_at: z.number().optional(),
    duration_s: z.number().optional(),
  })
  .loose();
export type RunRecord = z.infer<typeof runRecordSchema>;

export const healthSchema = z.object({
  status: z.string(),
  model_loaded: z.boolean(),
  active_checkpoint: z.string().nullable(),
  queue_depth: z.number(),
});
export type Health = z.infer<typeof healthSchema>;

/** Shape of FastAPI validation errors: a list of {loc, msg, type}. */
export const validationDetailSchema = z.array(
  z.object({
    loc: z.array(z.union([z.string(), z.number()])),
    msg: z.string(),
    type: z.string().optional(),
  }),
);
export type ValidationDetail = z.infer<typeof validationDetailSchema>;
