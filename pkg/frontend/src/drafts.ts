/**
 * Span draft model for the annotation editor.
 *
 * Drafts mirror the service's span rules: character offsets into the plain
 * sample text, half-open [start, end), disjoint or properly nested, never
 * crossing. Serialization emits the same inline tag markup the service
 * strict-parses, with the same fixed nesting order for same-extent spans
 * (emotional outside logical outside credibility), so anything the editor
 * can produce is accepted server-side.
 */
import type { SpanRecord, Tier1 } from "./types.js";

export interface SpanDraft {
  start: number;
  end: number;
  label: Tier1;
}

export type AddCheck = { ok: true } | { ok: false; reason: string };

/** Nesting rank for spans sharing an extent; lower nests outside. */
const SAME_EXTENT_RANK: Record<Tier1, number> = {
  emotional_fallacy: 0,
  logical_fallacy: 1,
  credibility_fallacy: 2,
};

function sameExtent(a: SpanDraft, b: SpanDraft): boolean {
  return a.start === b.start && a.end === b.end;
}

function properlyContains(outer: SpanDraft, inner: SpanDraft): boolean {
  return (
    outer.start <= inner.start && inner.end <= outer.end && !sameExtent(outer, inner)
  );
}

/** True when the two drafts partially overlap (neither disjoint nor nested). */
export function crosses(a: SpanDraft, b: SpanDraft): boolean {
  const [lo, hi] =
    a.start < b.start || (a.start === b.start && a.end <= b.end) ? [a, b] : [b, a];
  if (lo.end <= hi.start) return false; // disjoint
  if (lo.start <= hi.start && hi.end <= lo.end) return false; // nested / same extent
  if (hi.start <= lo.start && lo.end <= hi.end) return false;
  return true;
}

/**
 * Validate a candidate selection against the existing drafts.
 * Rejections never mutate anything; the reason is shown inline.
 */
export function canAdd(
  textLength: number,
  drafts: readonly SpanDraft[],
  candidate: SpanDraft,
): AddCheck {
  if (!Number.isInteger(candidate.start) || !Number.isInteger(candidate.end)) {
    return { ok: false, reason: "selection offsets must be integers" };
  }
  if (candidate.start < 0 || candidate.end > textLength) {
    return { ok: false, reason: "selection is outside the sample text" };
  }
  if (candidate.start >= candidate.end) {
    return { ok: false, reason: "selection is empty" };
  }
  for (const d of drafts) {
    if (sameExtent(d, candidate) && d.label === candidate.label) {
      return { ok: false, reason: "that exact span already carries this label" };
    }
    if (crosses(d, candidate)) {
      return {
        ok: false,
        reason:
          `selection [${candidate.start}, ${candidate.end}) crosses the existing ` +
          `${d.label} span [${d.start}, ${d.end}); spans must be disjoint or nested`,
      };
    }
  }
  return { ok: true };
}

/** Parent-first order: by start, longer first, fixed rank on ties. */
export function sortForRender(drafts: readonly SpanDraft[]): SpanDraft[] {
  return [...drafts].sort(
    (a, b) =>
      a.start - b.start ||
      b.end - a.end ||
      SAME_EXTENT_RANK[a.label] - SAME_EXTENT_RANK[b.label],
  );
}

function encloses(outer: SpanDraft, inner: SpanDraft): boolean {
  if (properlyContains(outer, inner)) return true;
  if (sameExtent(outer, inner)) {
    return SAME_EXTENT_RANK[outer.label] < SAME_EXTENT_RANK[inner.label];
  }
  return false;
}

/**
 * Serialize drafts over the plain text to inline tag markup.
 * The text itself is never altered; tags are interleaved around it.
 */
export function serializeTagged(text: string, drafts: readonly SpanDraft[]): string {
  const sorted = sortForRender(drafts);
  const children = new Map<number, number[]>([[-1, []]]);
  const stack: number[] = [];
  sorted.forEach((span, i) => {
    while (stack.length > 0) {
      const top = sorted[stack[stack.length - 1]!]!;
      if (encloses(top, span)) break;
      stack.pop();
    }
    const parent = stack.length > 0 ? stack[stack.length - 1]! : -1;
    children.get(parent)!.push(i);
    children.set(i, []);
    stack.push(i);
  });

  const emit = (node: number, lo: number, hi: number): string => {
    const parts: string[] = [];
    let cursor = lo;
    for (const ci of children.get(node) ?? []) {
      const child = sorted[ci]!;
      parts.push(text.slice(cursor, child.start));
      parts.push(`<${child.label}>`);
      parts.push(emit(ci, child.start, child.end));
      parts.push(`</${child.label}>`);
      cursor = child.end;
    }
    parts.push(text.slice(cursor, hi));
    return parts.join("");
  };
  return emit(-1, 0, text.length);
}

export interface Segment {
  start: number;
  end: number;
  text: string;
  /** Labels of every draft covering this segment, outermost first. */
  labels: Tier1[];
}

/**
 * Cut the text at every draft boundary. Concatenating segment texts always
 * reproduces the input exactly; depth/labels drive highlight styling.
 */
export function segmentize(text: string, drafts: readonly SpanDraft[]): Segment[] {
  const cuts = new Set<number>([0, text.length]);
  for (const d of drafts) {
    cuts.add(d.start);
    cuts.add(d.end);
  }
  const points = [...cuts].filter((p) => p >= 0 && p <= text.length).sort((x, y) => x - y);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i += 1) {
    const [a, b] = [points[i]!, points[i + 1]!];
    if (a === b) continue;
    const covering = sortForRender(drafts.filter((d) => d.start <= a && b <= d.end));
    segments.push({ start: a, end: b, text: text.slice(a, b), labels: covering.map((d) => d.label) });
  }
  if (segments.length === 0 && text.length === 0) {
    return [];
  }
  return segments;
}

/** Spans fetched from the service, narrowed to drafts for highlighting. */
export function recordsToDrafts(spans: readonly SpanRecord[]): SpanDraft[] {
  const known = new Set(["credibility_fallacy", "logical_fallacy", "emotional_fallacy"]);
  return spans
    .filter((s) => known.has(s.label))
    .map((s) => ({ start: s.start, end: s.end, label: s.label as Tier1 }));
}

interface SelectionLike {
  anchorNode: Node | null;
  anchorOffset: number;
  focusNode: Node | null;
  focusOffset: number;
}

function absoluteOffset(node: Node | null, offset: number): number | null {
  let el: Element | null =
    node instanceof Element ? node : node?.parentElement ?? null;
  while (el !== null) {
    const base = el.getAttribute("data-start");
    if (base !== null) return Number(base) + offset;
    el = el.parentElement;
  }
  return null;
}

/**
 * Map a DOM selection inside the segment container to [start, end) offsets
 * on the plain text. Each segment element carries data-start, so the offset
 * is base + position-within-node. Returns null when the selection is
 * collapsed or falls outside the rendered text.
 */
export function selectionToOffsets(sel: SelectionLike): [number, number] | null {
  const a = absoluteOffset(sel.anchorNode, sel.anchorOffset);
  const b = absoluteOffset(sel.focusNode, sel.focusOffset);
  if (a === null || b === null || a === b) return null;
  return a < b ? [a, b] : [b, a];
}
