/**
 * Interactive span editor.
 *
 * The sample text renders as read-only segments with highlight overlays;
 * the user selects a range, picks a tier-1 label (buttons or the c/l/e
 * keys), and the selection becomes a draft if it is disjoint from or nested
 * in the existing ones. Crossing selections are rejected inline and change
 * nothing. Submit serializes drafts to tagged markup and POSTs it; service
 * rejections are shown verbatim.
 */
import type { ReviewApi } from "./api.js";
import { ApiError } from "./api.js";
import {
  canAdd,
  segmentize,
  selectionToOffsets,
  serializeTagged,
  sortForRender,
  type SpanDraft,
} from "./drafts.js";
import { TIER1_LABELS, type Task, type Tier1 } from "./types.js";

const LABEL_KEYS: Record<string, Tier1> = {
  c: "credibility_fallacy",
  l: "logical_fallacy",
  e: "emotional_fallacy",
};

const SHORT_NAMES: Record<Tier1, string> = {
  credibility_fallacy: "credibility",
  logical_fallacy: "logical",
  emotional_fallacy: "emotional",
};

export class SpanEditor {
  readonly drafts: SpanDraft[] = [];
  activeLabel: Tier1 = "emotional_fallacy";
  private errorText = "";
  private submitted = false;

  constructor(
    private readonly root: HTMLElement,
    readonly task: Task,
    private readonly api: ReviewApi,
    private readonly onDone: () => void = () => {},
  ) {
    this.root.addEventListener("keydown", (event) => {
      const label = LABEL_KEYS[(event as KeyboardEvent).key];
      if (label) this.setLabel(label);
    });
    this.root.addEventListener("mouseup", () => this.captureSelection());
    this.render();
  }

  setLabel(label: Tier1): void {
    this.activeLabel = label;
    this.render();
  }

  /** Read the browser selection and try to turn it into a draft. */
  captureSelection(): void {
    const sel = this.root.ownerDocument.defaultView?.getSelection();
    if (!sel) return;
    const offsets = selectionToOffsets(sel);
    if (offsets === null) return;
    this.addSelection(offsets[0], offsets[1]);
    sel.removeAllRanges();
  }

  /**
   * Add [start, end) with the active label. Returns whether the draft was
   * accepted; on rejection the reason shows inline and state is unchanged.
   */
  addSelection(start: number, end: number): boolean {
    const candidate: SpanDraft = { start, end, label: this.activeLabel };
    const check = canAdd(this.task.text.length, this.drafts, candidate);
    if (!check.ok) {
      this.errorText = check.reason;
      this.render();
      return false;
    }
    this.drafts.push(candidate);
    this.errorText = "";
    this.render();
    return true;
  }

  removeDraft(index: number): void {
    this.drafts.splice(index, 1);
    this.errorText = "";
    this.render();
  }

  serialized(): string {
    return serializeTagged(this.task.text, this.drafts);
  }

  async submit(): Promise<boolean> {
    try {
      await this.api.submitAnnotation(this.task.task_id, this.serialized());
    } catch (err) {
      this.errorText = err instanceof ApiError ? err.detail : String(err);
      this.render();
      return false;
    }
    this.submitted = true;
    this.errorText = "";
    this.render();
    this.onDone();
    return true;
  }

  get error(): string {
    return this.errorText;
  }

  private render(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.classList.add("span-editor");

    const picker = doc.createElement("div");
    picker.className = "label-picker";
    for (const label of TIER1_LABELS) {
      const button = doc.createElement("button");
      button.type = "button";
      button.className = `label-btn ${label}`;
      if (label === this.activeLabel) button.classList.add("active");
      button.textContent = `${SHORT_NAMES[label]} (${label[0]})`;
      button.addEventListener("click", () => this.setLabel(label));
      picker.appendChild(button);
    }
    this.root.appendChild(picker);

    const textBox = doc.createElement("div");
    textBox.className = "sample-text";
    for (const segment of segmentize(this.task.text, this.drafts)) {
      const el = doc.createElement("span");
      el.setAttribute("data-start", String(segment.start));
      el.className = segment.labels.length
        ? `seg depth-${Math.min(segment.labels.length, 3)} ${segment.labels.join(" ")}`
        : "seg";
      el.textContent = segment.text;
      textBox.appendChild(el);
    }
    this.root.appendChild(textBox);

    const list = doc.createElement("ul");
    list.className = "draft-list";
    sortForRender(this.drafts).forEach((draft) => {
      const item = doc.createElement("li");
      const snippet = this.task.text.slice(draft.start, draft.end);
      item.textContent = `[${draft.start}, ${draft.end}) ${SHORT_NAMES[draft.label]}: "${snippet}" `;
      const remove = doc.createElement("button");
      remove.type = "button";
      remove.textContent = "remove";
      remove.addEventListener("click", () => {
        const index = this.drafts.findIndex(
          (d) => d.start === draft.start && d.end === draft.end && d.label === draft.label,
        );
        if (index >= 0) this.removeDraft(index);
      });
      item.appendChild(remove);
      list.appendChild(item);
    });
    this.root.appendChild(list);

    const error = doc.createElement("p");
    error.className = "editor-error";
    error.textContent = this.errorText;
    this.root.appendChild(error);

    const submit = doc.createElement("button");
    submit.type = "button";
    submit.className = "submit-btn";
    submit.textContent = this.submitted ? "submitted" : "submit annotation";
    submit.disabled = this.submitted;
    submit.addEventListener("click", () => void this.submit());
    this.root.appendChild(submit);
  }
}
