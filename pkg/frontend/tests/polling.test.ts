import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { pollJob } from "../src/polling.js";
import type { JobRecord } from "../src/types.js";

function job(status: JobRecord["status"], extra: Partial<JobRecord> = {}): JobRecord {
  return {
    job_id: "job-0001",
    kind: "model_document",
    doc_id: "01",
    params: {},
    status,
    result: null,
    error: null,
    ...extra,
  };
}

function apiReturning(sequence: JobRecord[]): ApiClient {
  let call = 0;
  return {
    getJob: async () => sequence[Math.min(call++, sequence.length - 1)],
  } as unknown as ApiClient;
}

const instantSleep = () => Promise.resolve();

describe("pollJob", () => {
  it("resolves once the job is done", async () => {
    const api = apiReturning([
      job("queued"),
      job("running"),
      job("done", { result: { topics: 4, min_cluster_size: 8, n_neighbors: 15 } }),
    ]);
    const ticks: string[] = [];
    const final = await pollJob(api, "job-0001", {
      intervalMs: 0,
      sleep: instantSleep,
      onTick: (j) => ticks.push(j.status),
    });
    expect(final.status).toBe("done");
    expect(final.result?.topics).toBe(4);
    expect(ticks).toEqual(["queued", "running", "done"]);
  });

  it("resolves failed jobs instead of throwing", async () => {
    const api = apiReturning([job("running"), job("failed", { error: "TooFewTopics: best 1" })]);
    const final = await pollJob(api, "job-0001", { intervalMs: 0, sleep: instantSleep });
    expect(final.status).toBe("failed");
    expect(final.error).toContain("TooFewTopics");
  });

  it("times out on jobs that never finish", async () => {
    const api = apiReturning([job("running")]);
    await expect(
      pollJob(api, "job-0001", { intervalMs: 5, timeoutMs: 1, sleep: instantSleep }),
    ).rejects.toThrow(/still running/);
  });
});
