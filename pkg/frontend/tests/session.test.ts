// @vitest-environment happy-dom
// @vitest-environment-options { "url": "http://127.0.0.1:8871" }
//
// Scripted end-to-end session against the real review service: enqueue via
// the CLI, serve over HTTP, drive the actual editor and form components,
// and verify everything through the service's own export endpoints.
// The document URL above matches the service origin so the browser
// environment treats API calls as same-origin, exactly like the bundle
// served from --static.
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, ReviewApi } from "../src/api.js";
import { SpanEditor } from "../src/editor.js";
import { LikertForm } from "../src/likert.js";
import type { SpanRecord, Task } from "../src/types.js";

const TEXT = "he is a Russian troll so do not listen";
const PORT = 8871;
const BASE = `http://127.0.0.1:${PORT}`;

const GOLD_SPANS: SpanRecord[] = [
  { start: 0, end: TEXT.length, label: "emotional_fallacy", tier2: null },
  { start: 8, end: 21, label: "credibility_fallacy", tier2: null },
];

let workDir: string;
let server: ChildProcess | undefined;
const api = new ReviewApi(BASE);

function cli(...args: string[]): void {
  const result = spawnSync(
    "python3",
    ["-c", "import sys; from slurg.cli import main; sys.exit(main(sys.argv[1:]))", ...args],
    { encoding: "utf-8" },
  );
  if (result.status !== 0) {
    throw new Error(`cli ${args.join(" ")} failed: ${result.stderr}`);
  }
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      await api.progress();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
  throw new Error(`review service did not come up on ${BASE}`);
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "slurg-ui-session-"));
  const corpusPath = join(workDir, "corpus.jsonl");
  writeFileSync(
    corpusPath,
    JSON.stringify({
      sample_id: "nested-1",
      annotator_id: "gold",
      source: "synthetic",
      text: TEXT,
      spans: GOLD_SPANS,
      meta: { split_name: "80/20" },
    }) + "\n",
  );
  const storeDir = join(workDir, "store");
  cli("review", "enqueue", "--store", storeDir, "--corpus", corpusPath,
      "--kind", "span_annotation", "--reviewers", "ui");
  cli("review", "enqueue", "--store", storeDir, "--corpus", corpusPath,
      "--kind", "likert_review", "--reviewers", "rater");

  server = spawn(
    "python3",
    ["-c", "import sys; from slurg.cli import main; sys.exit(main(sys.argv[1:]))",
     "review", "serve", "--store", storeDir, "--host", "127.0.0.1",
     "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

async function fetchTask(reviewer: string, kind: Task["kind"]): Promise<{ task: Task; scale: number }> {
  const { tasks, likert_scale } = await api.tasks({ reviewer, kind });
  expect(tasks).toHaveLength(1);
  return { task: tasks[0]!, scale: likert_scale };
}

describe("scripted review session", () => {
  it("round-trips the nested annotation through the editor and export", async () => {
    const { task } = await fetchTask("ui", "span_annotation");
    expect(task.text).toBe(TEXT);

    const editor = new SpanEditor(mount(), task, api);
    editor.setLabel("emotional_fallacy");
    expect(editor.addSelection(0, TEXT.length)).toBe(true);
    editor.setLabel("credibility_fallacy");
    expect(editor.addSelection(8, 21)).toBe(true);
    await expect(editor.submit()).resolves.toBe(true);

    const ndjson = await api.exportAnnotations();
    const records = ndjson
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as { annotator_id: string; text: string; spans: SpanRecord[] });
    const mine = records.find((r) => r.annotator_id === "ui");
    expect(mine).toBeDefined();
    expect(mine!.text).toBe(TEXT);
    const key = (s: SpanRecord) => `${s.start}:${s.end}:${s.label}`;
    expect(new Set(mine!.spans.map(key))).toEqual(new Set(GOLD_SPANS.map(key)));
  }, 20_000);

  it("rejects a crossing selection without touching the server state", async () => {
    const { task } = await fetchTask("ui", "span_annotation");
    const editor = new SpanEditor(mount(), task, api);
    editor.setLabel("emotional_fallacy");
    editor.addSelection(0, 21);
    expect(editor.addSelection(8, 30)).toBe(false);
    expect(editor.error).toContain("crosses");
  }, 20_000);

  it("keeps out-of-scale likert values unsubmittable, then accepts (4,4,4)", async () => {
    const { task, scale } = await fetchTask("rater", "likert_review");
    expect(scale).toBe(4);
    expect(task.spans).toBeDefined();

    const form = new LikertForm(mount(), task, scale, api);
    expect(form.setValue("realism", scale + 1)).toBe(false);
    expect(form.complete).toBe(false);
    await expect(form.submit()).resolves.toBe(false);

    // the service enforces the same bound when the UI guard is bypassed
    await expect(
      api.submitLikert(task.task_id, {
        realism: scale + 1,
        fallacy_accuracy: 1,
        span_accuracy: 1,
      }),
    ).rejects.toSatisfy((err: unknown) => err instanceof ApiError && err.status === 400);

    form.setValue("realism", 4);
    form.setValue("fallacy_accuracy", 4);
    form.setValue("span_accuracy", 4);
    await expect(form.submit()).resolves.toBe(true);

    const rows = await api.exportLikert("rows");
    const lines = rows.trim().split("\n");
    expect(lines[0]).toBe("split,reviewer,criterion,value");
    for (const criterion of ["realism", "fallacy_accuracy", "span_accuracy"]) {
      expect(lines).toContain(`80/20,rater,${criterion},4`);
    }

    const means = await api.exportLikert("means");
    expect(means.trim().split("\n")).toContain("80/20,fallacy_accuracy,4.000000");
  }, 20_000);

  it("reports progress across both task kinds", async () => {
    const progress = await api.progress();
    expect(progress.total).toBe(2);
    expect(progress.done).toBe(2);
    expect(progress.by_kind.span_annotation).toEqual({ pending: 0, done: 1 });
    expect(progress.by_kind.likert_review).toEqual({ pending: 0, done: 1 });
  }, 20_000);
});
