/** Thin fetch client for the review service endpoints. */
import type {
  LikertCriterion,
  Progress,
  SampleResponse,
  Task,
  TaskKind,
  TaskListResponse,
  TaskStatus,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function raise(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export interface TaskFilters {
  reviewer?: string;
  kind?: TaskKind;
  status?: TaskStatus;
}

export class ReviewApi {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async tasks(filters: TaskFilters = {}): Promise<TaskListResponse> {
    const params = new URLSearchParams();
    if (filters.reviewer) params.set("reviewer", filters.reviewer);
    if (filters.kind) params.set("kind", filters.kind);
    if (filters.status) params.set("status", filters.status);
    const query = params.toString();
    const response = await fetch(this.url(`/api/tasks${query ? `?${query}` : ""}`));
    if (!response.ok) await raise(response);
    return (await response.json()) as TaskListResponse;
  }

  async sample(sampleId: string): Promise<SampleResponse> {
    const response = await fetch(this.url(`/api/samples/${encodeURIComponent(sampleId)}`));
    if (!response.ok) await raise(response);
    return (await response.json()) as SampleResponse;
  }

  async submitAnnotation(taskId: string, tagged: string): Promise<void> {
    const response = await fetch(this.url("/api/annotations"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ task_id: taskId, tagged }),
    });
    if (!response.ok) await raise(response);
  }

  async submitLikert(
    taskId: string,
    values: Record<LikertCriterion, number>,
  ): Promise<void> {
    const response = await fetch(this.url("/api/likert"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ task_id: taskId, ...values }),
    });
    if (!response.ok) await raise(response);
  }

  async exportAnnotations(): Promise<string> {
    const response = await fetch(this.url("/api/export?kind=span_annotation"));
    if (!response.ok) await raise(response);
    return response.text();
  }

  async exportLikert(table: "rows" | "means" = "rows"): Promise<string> {
    const response = await fetch(
      this.url(`/api/export?kind=likert_review&table=${table}`),
    );
    if (!response.ok) await raise(response);
    return response.text();
  }

  async progress(): Promise<Progress> {
    const response = await fetch(this.url("/api/progress"));
    if (!response.ok) await raise(response);
    return (await response.json()) as Progress;
  }
}

export type { Task };
