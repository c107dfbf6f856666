"""Codec between inline nested fallacy markup and span sets.

The wire format is plain text interleaved with exactly three tag pairs:
``<credibility_fallacy>``, ``<logical_fallacy>`` and ``<emotional_fallacy>``.
Tags nest but never cross. ``parse_tagged`` turns markup into an
AnnotatedSample whose offsets index the de-tagged text; ``render_tagged``
is its exact inverse on valid samples.

Strict mode is for human-entered data and raises on any malformation.
Lenient mode is for model output: unknown tags are stripped, dangling
opens closed at end of text, stray closes dropped, and crossing tags
truncated at the earlier close. Every fix is recorded as a repair, so
nothing is silently rewritten.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .spans import (
    AnnotatedSample,
    FallacyLabel,
    Source,
    Span,
    Tier1,
    _extent_rank,
    span_sort_key,
    validate_sample,
)

TAG_NAMES: Mapping[str, Tier1] = {
    "credibility_fallacy": Tier1.CREDIBILITY,
    "logical_fallacy": Tier1.LOGICAL,
    "emotional_fallacy": Tier1.EMOTIONAL,
}

LABELED_TEXT_TAG = "labeled_text"
GENERATED_SAMPLES_TAG = "generated_samples"
ANALYSIS_TAG = "fallacy_analysis"

# Anything shaped like a simple XML tag; everything else, including bare
# '<' and '>', is treated as plain text.
_TAG_RE = re.compile(r"<(/?)([A-Za-z_][A-Za-z0-9_-]*)\s*>")


class Strictness(enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class Repair:
    """One fix the lenient parser applied."""

    kind: str  # dropped-unknown-tag | closed-dangling-tag | dropped-stray-close |
    #            truncated-crossing-tag | dropped-empty-span
    position: int  # offset into the *tagged* input where the fix happened
    detail: str = ""


@dataclass(frozen=True)
class ParseReport:
    sample: AnnotatedSample
    repairs: tuple[Repair, ...]
    strictness: Strictness


class MalformedMarkup(ValueError):
    """Strict-mode parse failure."""

    def __init__(self, position: int, kind: str, detail: str = ""):
        self.position = position
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind} at {position}: {detail}")


class InvalidSample(ValueError):
    """render_tagged refused a sample that fails validation."""


@dataclass
class _OpenTag:
    tier1: Tier1
    plain_start: int
    raw_pos: int


def parse_tagged(
    text: str,
    mode: Strictness = Strictness.STRICT,
    *,
    sample_id: str = "",
    annotator_id: str = "",
    source: Source = Source.SYNTHETIC,
    meta: Optional[Mapping[str, str]] = None,
) -> ParseReport:
    """Parse inline markup into a span-annotated sample.

    The returned sample's text is the input with all tags removed; each
    tag pair becomes one span over the de-tagged text. Identity fields
    (sample_id, annotator_id, source, meta) are passed through so a parse
    can reconstruct a specific sample exactly.
    """
    plain_parts: list[str] = []
    plain_len = 0
    stack: list[_OpenTag] = []
    spans: list[Span] = []
    repairs: list[Repair] = []
    strict = mode is Strictness.STRICT

    def close_top(raw_pos: int, repair_kind: Optional[str] = None) -> None:
        nonlocal plain_len
        top = stack.pop()
        if top.plain_start == plain_len:
            if strict:
                raise MalformedMarkup(raw_pos, "empty-span", top.tier1.value)
            repairs.append(Repair("dropped-empty-span", raw_pos, top.tier1.value))
            return
        spans.append(Span(top.plain_start, plain_len, FallacyLabel(top.tier1)))
        if repair_kind:
            repairs.append(Repair(repair_kind, raw_pos, top.tier1.value))

    pos = 0
    for match in _TAG_RE.finditer(text):
        plain_parts.append(text[pos : match.start()])
        plain_len += match.start() - pos
        pos = match.end()
        closing, name = match.group(1) == "/", match.group(2)
        tier1 = TAG_NAMES.get(name)
        if tier1 is None:
            if strict:
                raise MalformedMarkup(match.start(), "unknown-tag", name)
            repairs.append(Repair("dropped-unknown-tag", match.start(), name))
            continue
        if not closing:
            stack.append(_OpenTag(tier1, plain_len, match.start()))
            continue
        if not any(open_tag.tier1 is tier1 for open_tag in stack):
            if strict:
                raise MalformedMarkup(match.start(), "stray-close", name)
            repairs.append(Repair("dropped-stray-close", match.start(), name))
            continue
        if stack[-1].tier1 is not tier1:
            # close arrived for a deeper element: tags cross
            if strict:
                raise MalformedMarkup(match.start(), "crossing-tags", name)
            while stack[-1].tier1 is not tier1:
                close_top(match.start(), "truncated-crossing-tag")
        close_top(match.start())

    plain_parts.append(text[pos:])
    plain_len += len(text) - pos
    while stack:
        if strict:
            raise MalformedMarkup(stack[-1].raw_pos, "unclosed-tag", stack[-1].tier1.value)
        close_top(len(text), "closed-dangling-tag")

    sample = AnnotatedSample(
        sample_id=sample_id,
        text="".join(plain_parts),
        spans=frozenset(spans),
        annotator_id=annotator_id,
        source=source,
        meta=dict(meta or {}),
    )
    return ParseReport(sample=sample, repairs=tuple(repairs), strictness=mode)


def render_tagged(sample: AnnotatedSample) -> str:
    """Serialize a sample back to inline markup.

    Inverse of strict parse: parse_tagged(render_tagged(s)) reproduces s
    for any valid sample whose labels are wire-representable (tier-2
    refinements are not part of the tag vocabulary and are dropped).
    Same-extent spans nest Emotional outside Logical outside Credibility;
    siblings are emitted in start order.
    """
    violations = validate_sample(sample)
    if violations:
        raise InvalidSample("; ".join(f"{v.kind}: {v.detail}" for v in violations))

    # spans sorted parent-first; a stack assigns each span its nearest
    # enclosing open span, yielding a forest of nesting intervals
    children: dict[Optional[Span], list[Span]] = {None: []}
    stack: list[Span] = []
    for span in sample.spans_sorted():
        while stack and not _encloses(stack[-1], span):
            stack.pop()
        parent = stack[-1] if stack else None
        children.setdefault(parent, []).append(span)
        children.setdefault(span, [])
        stack.append(span)

    def emit(node: Optional[Span], lo: int, hi: int) -> str:
        parts: list[str] = []
        cursor = lo
        for child in children.get(node, []):
            parts.append(sample.text[cursor : child.start])
            open_tag = child.tier1.value
            parts.append(f"<{open_tag}>")
            parts.append(emit(child, child.start, child.end))
            parts.append(f"</{open_tag}>")
            cursor = child.end
        parts.append(sample.text[cursor:hi])
        return "".join(parts)

    return emit(None, 0, len(sample.text))


def _encloses(outer: Span, inner: Span) -> bool:
    if outer.contains(inner):
        return True
    if (outer.start, outer.end) == (inner.start, inner.end):
        return _extent_rank(outer) < _extent_rank(inner) or (
            _extent_rank(outer) == _extent_rank(inner)
            and span_sort_key(outer) < span_sort_key(inner)
        )
    return False


def _block_re(name: str) -> re.Pattern:
    return re.compile(rf"<{name}\s*>(.*?)</{name}\s*>", re.DOTALL)


_LABELED_RE = _block_re(LABELED_TEXT_TAG)
_WRAPPER_RE = _block_re(GENERATED_SAMPLES_TAG)
_ANALYSIS_RE = _block_re(ANALYSIS_TAG)


def extract_labeled_blocks(raw_llm_output: str) -> list[str]:
    """Pull every <labeled_text> block out of raw model output.

    Analysis sections are discarded first; when a <generated_samples>
    wrapper is present only its contents are searched. Block payloads are
    stripped of leading/trailing whitespace. Absence is an empty list,
    never an error.
    """
    text = _ANALYSIS_RE.sub("", raw_llm_output)
    wrapped = _WRAPPER_RE.findall(text)
    haystack = "\n".join(wrapped) if wrapped else text
    return [m.strip() for m in _LABELED_RE.findall(haystack)]
