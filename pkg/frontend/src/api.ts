import type {
  Assignment,
  AssignmentState,
  ClusterCard,
  DocumentInfo,
  EvolutionSeries,
  JobRecord,
  ThemeCount,
} from "./types.js";

export type Fetcher = typeof fetch;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

// The fetcher is injectable so tests can run without a browser or server.
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetcher: Fetcher = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getDocuments(): Promise<DocumentInfo[]> {
    return this.request("/api/documents");
  }

  getTopics(docId: string): Promise<ClusterCard[]> {
    return this.request(`/api/documents/${encodeURIComponent(docId)}/topics`);
  }

  getAssignments(docId: string): Promise<AssignmentState> {
    return this.request(`/api/assignments/${encodeURIComponent(docId)}`);
  }

  putAssignment(
    docId: string,
    topicId: number,
    body: { themes: string[]; coherent: boolean; annotator: string },
  ): Promise<Assignment> {
    return this.request(`/api/assignments/${encodeURIComponent(docId)}/${topicId}`, {
      method: "PUT",
      body: JSON.stringify(body),
    });
  }

  rerun(docId: string, overrides: { min_cluster_size?: number; n_neighbors?: number } = {}): Promise<JobRecord> {
    return this.request("/api/rerun", {
      method: "POST",
      body: JSON.stringify({ doc_id: docId, ...overrides }),
    });
  }

  getJob(jobId: string): Promise<JobRecord> {
    return this.request(`/api/jobs/${encodeURIComponent(jobId)}`);
  }

  getThemes(): Promise<ThemeCount[]> {
    return this.request("/api/themes");
  }

  getEvolution(k: number, direction: "top" | "bottom"): Promise<EvolutionSeries[]> {
    return this.request(`/api/evolution?k=${k}&direction=${direction}`);
  }
}
