/**
 * Three-criterion Likert scoring form for generated samples.
 *
 * The sample text renders with its spans highlighted so span accuracy can
 * be judged. Exactly `scale` radio values appear per criterion; submit
 * stays disabled until all three criteria are set, so out-of-scale or
 * partial submissions cannot be produced from the UI.
 */
import type { ReviewApi } from "./api.js";
import { ApiError } from "./api.js";
import { recordsToDrafts, segmentize } from "./drafts.js";
import {
  LIKERT_CRITERIA,
  type LikertCriterion,
  type Task,
} from "./types.js";

const CRITERION_TITLES: Record<LikertCriterion, string> = {
  realism: "Realism",
  fallacy_accuracy: "Fallacy accuracy",
  span_accuracy: "Span accuracy",
};

export class LikertForm {
  private readonly values = new Map<LikertCriterion, number>();
  private errorText = "";
  private submitted = false;

  constructor(
    private readonly root: HTMLElement,
    readonly task: Task,
    readonly scale: number,
    private readonly api: ReviewApi,
    private readonly onDone: () => void = () => {},
  ) {
    this.render();
  }

  /**
   * Record a criterion value. Values outside 1..scale are refused and
   * leave the form state untouched.
   */
  setValue(criterion: LikertCriterion, value: number): boolean {
    if (!Number.isInteger(value) || value < 1 || value > this.scale) {
      return false;
    }
    this.values.set(criterion, value);
    this.render();
    return true;
  }

  get complete(): boolean {
    return LIKERT_CRITERIA.every((c) => this.values.has(c));
  }

  get error(): string {
    return this.errorText;
  }

  async submit(): Promise<boolean> {
    if (!this.complete || this.submitted) return false;
    const payload = {
      realism: this.values.get("realism")!,
      fallacy_accuracy: this.values.get("fallacy_accuracy")!,
      span_accuracy: this.values.get("span_accuracy")!,
    };
    try {
      await this.api.submitLikert(this.task.task_id, payload);
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

  private render(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.classList.add("likert-form");

    const textBox = doc.createElement("div");
    textBox.className = "sample-text";
    const drafts = recordsToDrafts(this.task.spans ?? []);
    for (const segment of segmentize(this.task.text, drafts)) {
      const el = doc.createElement("span");
      el.setAttribute("data-start", String(segment.start));
      el.className = segment.labels.length
        ? `seg depth-${Math.min(segment.labels.length, 3)} ${segment.labels.join(" ")}`
        : "seg";
      el.textContent = segment.text;
      textBox.appendChild(el);
    }
    this.root.appendChild(textBox);

    for (const criterion of LIKERT_CRITERIA) {
      const fieldset = doc.createElement("fieldset");
      fieldset.className = `criterion ${criterion}`;
      const legend = doc.createElement("legend");
      legend.textContent = CRITERION_TITLES[criterion];
      fieldset.appendChild(legend);
      for (let value = 1; value <= this.scale; value += 1) {
        const label = doc.createElement("label");
        const radio = doc.createElement("input");
        radio.type = "radio";
        radio.name = `${this.task.task_id}:${criterion}`;
        radio.value = String(value);
        radio.checked = this.values.get(criterion) === value;
        radio.addEventListener("change", () => this.setValue(criterion, value));
        label.appendChild(radio);
        label.appendChild(doc.createTextNode(String(value)));
        fieldset.appendChild(label);
      }
      this.root.appendChild(fieldset);
    }

    const error = doc.createElement("p");
    error.className = "editor-error";
    error.textContent = this.errorText;
    this.root.appendChild(error);

    const submit = doc.createElement("button");
    submit.type = "button";
    submit.className = "submit-btn";
    submit.textContent = this.submitted ? "submitted" : "submit scores";
    submit.disabled = !this.complete || this.submitted;
    submit.addEventListener("click", () => void this.submit());
    this.root.appendChild(submit);
  }
}
