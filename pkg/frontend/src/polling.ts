import type { ApiClient } from "./api.js";
import type { JobRecord } from "./types.js";

export type PollOptions = {
  intervalMs?: number;
  timeoutMs?: number;
  onTick?: (job: JobRecord) => void;
  sleep?: (ms: number) => Promise<void>;
};

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a rerun job until it reaches a terminal state. Resolves with the
 * final record for both "done" and "failed"; the caller decides how to
 * surface failures. Rejects only on timeout or transport errors.
 */
export async function pollJob(api: ApiClient, jobId: string, options: PollOptions = {}): Promise<JobRecord> {
  const intervalMs = options.intervalMs ?? 1000;
  const timeoutMs = options.timeoutMs ?? 120_000;
  const sleep = options.sleep ?? defaultSleep;
  const startedAt = Date.now();
  for (;;) {
    const job = await api.getJob(jobId);
    options.onTick?.(job);
    if (job.status === "done" || job.status === "failed") {
      return job;
    }
    if (Date.now() - startedAt > timeoutMs) {
      throw new Error(`job ${jobId} still ${job.status} after ${timeoutMs}ms`);
    }
    await sleep(intervalMs);
  }
}
