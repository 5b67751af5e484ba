import { ApiClient, ApiError } from "./api.js";
import type { Assignment, ClusterCard } from "./types.js";
import { checkConsistency, checkThemes } from "./validation.js";

export type SaveResult =
  | { ok: true; assignment: Assignment }
  | { ok: false; status: number | null; reason: string };

/**
 * Per-document review state with optimistic saves: the card is updated
 * before the PUT and rolled back when the server rejects it (4xx).
 */
export class ReviewStore {
  cards: ClusterCard[] = [];

  constructor(
    private api: ApiClient,
    public docId: string,
    public annotator: string,
  ) {}

  async load(): Promise<ClusterCard[]> {
    this.cards = await this.api.getTopics(this.docId);
    return this.cards;
  }

  card(topicId: number): ClusterCard | undefined {
    return this.cards.find((c) => c.topic_id === topicId);
  }

  async save(topicId: number, themes: string[], coherent: boolean): Promise<SaveResult> {
    const card = this.card(topicId);
    if (!card) return { ok: false, status: null, reason: `unknown topic ${topicId}` };
    const checked = checkThemes(themes);
    if (!checked.ok) return { ok: false, status: null, reason: checked.reason };
    const consistent = checkConsistency(coherent, checked.themes);
    if (!consistent.ok) return { ok: false, status: null, reason: consistent.reason };

    const previous = card.assignment;
    const optimistic: Assignment = {
      doc_id: this.docId,
      topic_id: topicId,
      coherent,
      themes: checked.themes,
      annotator: this.annotator,
    };
    card.assignment = optimistic;
    card.stale_assignment = false;
    try {
      const stored = await this.api.putAssignment(this.docId, topicId, {
        themes: checked.themes,
        coherent,
        annotator: this.annotator,
      });
      card.assignment = stored;
      return { ok: true, assignment: stored };
    } catch (err) {
      card.assignment = previous; // roll back the optimistic update
      if (err instanceof ApiError) {
        return { ok: false, status: err.status, reason: err.detail };
      }
      throw err;
    }
  }
}
