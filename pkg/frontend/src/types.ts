// Payload shapes of the policytopics HTTP API. Field names mirror the
// server's CSV headers exactly.

export type DocumentInfo = {
  doc_id: string;
  title: string;
  issuer: string;
  doc_type: string;
  year: number;
  era: "pre_ai_act" | "post_ai_act";
};

export type TopTerm = { term: string; weight: number };

export type Representative = {
  sentence_index: number;
  similarity: number;
  text: string;
};

export type Assignment = {
  doc_id: string;
  topic_id: number;
  coherent: boolean;
  themes: string[];
  annotator: string;
};

export type ClusterCard = {
  doc_id: string;
  topic_id: number;
  size: number;
  top_terms: TopTerm[];
  representatives: Representative[];
  assignment: Assignment | null;
  stale_assignment: boolean;
};

export type JobRecord = {
  job_id: string;
  kind: string;
  doc_id: string;
  params: Record<string, number>;
  status: "queued" | "running" | "done" | "failed";
  result: { topics: number; min_cluster_size: number; n_neighbors: number } | null;
  error: string | null;
};

export type ThemeCount = { theme: string; count: number };

export type EvolutionPoint = { year: number; count: number };

export type EvolutionSeries = {
  theme: string;
  points: EvolutionPoint[];
  era: { pre: number; post: number };
};

export type AssignmentState = {
  current: Assignment[];
  stale: Assignment[];
};
