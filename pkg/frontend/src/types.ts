/** Wire types for the review service JSON API. */

export type Tier1 =
  | "credibility_fallacy"
  | "logical_fallacy"
  | "emotional_fallacy";

export const TIER1_LABELS: readonly Tier1[] = [
  "credibility_fallacy",
  "logical_fallacy",
  "emotional_fallacy",
];

export type TaskKind = "span_annotation" | "likert_review";
export type TaskStatus = "pending" | "done";

export interface SpanRecord {
  start: number;
  end: number;
  label: string;
  tier2?: string | null;
}

export interface Task {
  task_id: string;
  sample_id: string;
  reviewer_id: string;
  kind: TaskKind;
  status: TaskStatus;
  text: string;
  split: string;
  /** Present on likert_review tasks only. */
  spans?: SpanRecord[];
}

export interface TaskListResponse {
  tasks: Task[];
  likert_scale: number;
}

export interface SampleResponse {
  sample_id: string;
  text: string;
  spans: SpanRecord[];
  split: string;
}

export type LikertCriterion = "realism" | "fallacy_accuracy" | "span_accuracy";

export const LIKERT_CRITERIA: readonly LikertCriterion[] = [
  "realism",
  "fallacy_accuracy",
  "span_accuracy",
];

export interface Progress {
  total: number;
  done: number;
  by_kind: Record<string, { pending: number; done: number }>;
  likert_scale: number;
}
