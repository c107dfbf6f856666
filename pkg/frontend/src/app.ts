/**
 * Entry point: task list with progress header, switching into the span
 * editor or the Likert form per task. The reviewer comes from the
 * ?reviewer= query parameter.
 */
import { ReviewApi } from "./api.js";
import { SpanEditor } from "./editor.js";
import { LikertForm } from "./likert.js";
import type { Task } from "./types.js";

export async function initApp(root: HTMLElement, api: ReviewApi): Promise<void> {
  const doc = root.ownerDocument;
  const params = new URLSearchParams(doc.defaultView?.location.search ?? "");
  const reviewer = params.get("reviewer") ?? "";

  const header = doc.createElement("header");
  const heading = doc.createElement("h1");
  heading.textContent = reviewer ? `Review queue for ${reviewer}` : "Review queue";
  const progressLine = doc.createElement("p");
  progressLine.className = "progress";
  header.appendChild(heading);
  header.appendChild(progressLine);

  const main = doc.createElement("main");
  root.textContent = "";
  root.appendChild(header);
  root.appendChild(main);

  async function refreshProgress(): Promise<void> {
    const progress = await api.progress();
    progressLine.textContent = `${progress.done} / ${progress.total} tasks done`;
  }

  async function showList(): Promise<void> {
    main.textContent = "";
    await refreshProgress();
    const { tasks, likert_scale } = await api.tasks(
      reviewer ? { reviewer } : {},
    );
    const list = doc.createElement("ul");
    list.className = "task-list";
    for (const task of tasks) {
      const item = doc.createElement("li");
      const open = doc.createElement("button");
      open.type = "button";
      open.textContent = `${task.kind} ${task.sample_id} [${task.status}]`;
      open.disabled = task.status === "done";
      open.addEventListener("click", () => showTask(task, likert_scale));
      item.appendChild(open);
      list.appendChild(item);
    }
    main.appendChild(list);
  }

  function showTask(task: Task, scale: number): void {
    main.textContent = "";
    const back = doc.createElement("button");
    back.type = "button";
    back.textContent = "back to queue";
    back.addEventListener("click", () => void showList());
    main.appendChild(back);

    const view = doc.createElement("section");
    main.appendChild(view);
    const done = (): void => void showList();
    if (task.kind === "span_annotation") {
      new SpanEditor(view, task, api, done);
    } else {
      new LikertForm(view, task, scale, api, done);
    }
  }

  await showList();
}

// Browser bootstrap; tests import the pieces directly instead.
if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    void initApp(root, new ReviewApi(""));
  }
}
