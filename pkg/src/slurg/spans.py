"""Core domain types: fallacy labels, character spans, annotated samples, corpora.

Offsets always index Unicode code points of the plain (tag-free) text,
start inclusive, end exclusive. Spans within one sample must be pairwise
disjoint or nested; partially overlapping ("crossing") spans cannot be
expressed in the inline tag format and are rejected by validation.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence


class Tier1(enum.Enum):
    """Top-level fallacy category."""

    CREDIBILITY = "credibility_fallacy"
    LOGICAL = "logical_fallacy"
    EMOTIONAL = "emotional_fallacy"

    @property
    def wire_name(self) -> str:
        return self.value

    @classmethod
    def from_wire(cls, name: str) -> "Tier1":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown tier-1 label: {name!r}")


class Tier2(enum.Enum):
    """Fine-grained fallacy, grouped under exactly one tier-1 category."""

    # credibility
    AD_HOMINEM = "ad hominem"
    AD_POPULUM = "ad populum"
    APPEAL_TO_AUTHORITY = "appeal to authority"
    APPEAL_TO_NATURE = "appeal to nature"
    APPEAL_TO_TRADITION = "appeal to tradition"
    TU_QUOQUE = "tu quoque"
    # logic
    CAUSAL_OVERSIMPLIFICATION = "causal oversimplification"
    CIRCULAR_REASONING = "circular reasoning"
    EQUIVOCATION = "equivocation"
    FALSE_ANALOGY = "false analogy"
    FALSE_CAUSALITY = "false causality"
    FALSE_DILEMMA = "false dilemma"
    HASTY_GENERALIZATION = "hasty generalization"
    SLIPPERY_SLOPE = "slippery slope"
    STRAW_MAN = "straw man"
    FALLACY_OF_DIVISION = "fallacy of division"
    # emotion
    APPEAL_TO_POSITIVE_EMOTION = "appeal to positive emotion"
    APPEAL_TO_FEAR = "appeal to fear"
    APPEAL_TO_PITY = "appeal to pity"
    APPEAL_TO_ANGER = "appeal to anger"
    APPEAL_TO_RIDICULE = "appeal to ridicule"
    APPEAL_TO_WORSE_PROBLEM = "appeal to worse problem"

    @classmethod
    def from_wire(cls, name: str) -> "Tier2":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown tier-2 label: {name!r}")


TIER2_GROUPS: Mapping[Tier1, frozenset[Tier2]] = {
    Tier1.CREDIBILITY: frozenset(
        {
            Tier2.AD_HOMINEM,
            Tier2.AD_POPULUM,
            Tier2.APPEAL_TO_AUTHORITY,
            Tier2.APPEAL_TO_NATURE,
            Tier2.APPEAL_TO_TRADITION,
            Tier2.TU_QUOQUE,
        }
    ),
    Tier1.LOGICAL: frozenset(
        {
            Tier2.CAUSAL_OVERSIMPLIFICATION,
            Tier2.CIRCULAR_REASONING,
            Tier2.EQUIVOCATION,
            Tier2.FALSE_ANALOGY,
            Tier2.FALSE_CAUSALITY,
            Tier2.FALSE_DILEMMA,
            Tier2.HASTY_GENERALIZATION,
            Tier2.SLIPPERY_SLOPE,
            Tier2.STRAW_MAN,
            Tier2.FALLACY_OF_DIVISION,
        }
    ),
    Tier1.EMOTIONAL: frozenset(
        {
            Tier2.APPEAL_TO_POSITIVE_EMOTION,
            Tier2.APPEAL_TO_FEAR,
            Tier2.APPEAL_TO_PITY,
            Tier2.APPEAL_TO_ANGER,
            Tier2.APPEAL_TO_RIDICULE,
            Tier2.APPEAL_TO_WORSE_PROBLEM,
        }
    ),
}


def tier1_of(tier2: Tier2) -> Tier1:
    for tier1, group in TIER2_GROUPS.items():
        if tier2 in group:
            return tier1
    raise ValueError(f"{tier2} belongs to no tier-1 group")


class Source(enum.Enum):
    REDDIT = "reddit"
    FOURCHAN = "fourchan"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class FallacyLabel:
    """A tier-1 category with an optional tier-2 refinement."""

    tier1: Tier1
    tier2: Optional[Tier2] = None

    def __post_init__(self) -> None:
        if self.tier2 is not None and self.tier2 not in TIER2_GROUPS[self.tier1]:
            raise ValueError(
                f"tier-2 {self.tier2.value!r} does not belong to {self.tier1.value!r}"
            )

    @property
    def wire_name(self) -> str:
        return self.tier1.wire_name


CREDIBILITY = FallacyLabel(Tier1.CREDIBILITY)
LOGICAL = FallacyLabel(Tier1.LOGICAL)
EMOTIONAL = FallacyLabel(Tier1.EMOTIONAL)


@dataclass(frozen=True)
class Span:
    """Labeled character range: start inclusive, end exclusive."""

    start: int
    end: int
    label: FallacyLabel

    @property
    def tier1(self) -> Tier1:
        return self.label.tier1

    def contains(self, other: "Span") -> bool:
        """Strict containment (other properly inside self)."""
        return (
            self.start <= other.start
            and other.end <= self.end
            and (self.start, self.end) != (other.start, other.end)
        )


def span_sort_key(span: Span) -> tuple:
    """Stable total order: offsets, then tier-1 wire name, then tier-2."""
    return (
        span.start,
        span.end,
        span.label.tier1.value,
        span.label.tier2.value if span.label.tier2 else "",
    )


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validate_sample."""

    kind: str
    detail: str


@dataclass(frozen=True)
class AnnotatedSample:
    sample_id: str
    text: str
    spans: frozenset[Span] = frozenset()
    annotator_id: str = ""
    source: Source = Source.SYNTHETIC
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "spans", frozenset(self.spans))
        object.__setattr__(self, "meta", dict(self.meta))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnotatedSample):
            return NotImplemented
        return (
            self.sample_id == other.sample_id
            and self.text == other.text
            and self.spans == other.spans
            and self.annotator_id == other.annotator_id
            and self.source == other.source
            and dict(self.meta) == dict(other.meta)
        )

    def __hash__(self) -> int:
        return hash((self.sample_id, self.text, self.spans, self.annotator_id, self.source))

    def spans_sorted(self) -> list[Span]:
        """Spans in (start, -end, same-extent-rank) order: parents before children."""
        return sorted(
            self.spans,
            key=lambda s: (s.start, -s.end, _extent_rank(s), span_sort_key(s)),
        )


# Fixed arbitrary total order for same-extent multi-label spans: the
# Emotional tag nests outermost, then Logical, then Credibility.
_SAME_EXTENT_ORDER = {Tier1.EMOTIONAL: 0, Tier1.LOGICAL: 1, Tier1.CREDIBILITY: 2}


def _extent_rank(span: Span) -> int:
    return _SAME_EXTENT_ORDER[span.tier1]


def spans_cross(a: Span, b: Span) -> bool:
    """True when a and b partially overlap (neither disjoint nor nested)."""
    lo, hi = (a, b) if (a.start, a.end) <= (b.start, b.end) else (b, a)
    if lo.end <= hi.start:  # disjoint
        return False
    if lo.start <= hi.start and hi.end <= lo.end:  # nested or same extent
        return False
    if hi.start <= lo.start and lo.end <= hi.end:
        return False
    return True


def validate_sample(sample: AnnotatedSample) -> list[Violation]:
    """Collect every invariant violation; an empty list means the sample is ok.

    Total over any structurally well-formed sample: violations are returned
    as data, never raised. The verdict does not depend on span order.
    """
    violations: list[Violation] = []
    n = len(sample.text)
    for span in sorted(sample.spans, key=span_sort_key):
        if not (0 <= span.start < span.end <= n):
            violations.append(
                Violation(
                    "span-out-of-bounds",
                    f"span ({span.start}, {span.end}) outside [0, {n}] or empty",
                )
            )
    ordered = sorted(sample.spans, key=lambda s: (s.start, s.end))
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            if b.start >= a.end:
                break
            if spans_cross(a, b):
                violations.append(
                    Violation(
                        "crossing-overlap",
                        f"spans ({a.start}, {a.end}) and ({b.start}, {b.end}) "
                        "partially overlap",
                    )
                )
    # tier mismatch is unrepresentable through FallacyLabel's constructor,
    # but samples built from raw wire data may carry it via object.__new__;
    # re-check so validation never trusts upstream construction.
    for span in sample.spans:
        t2 = span.label.tier2
        if t2 is not None and t2 not in TIER2_GROUPS[span.label.tier1]:
            violations.append(
                Violation(
                    "tier-mismatch",
                    f"{t2.value!r} is not a {span.label.tier1.value!r} fallacy",
                )
            )
    return violations


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Corpus:
    """Ordered collection of samples.

    Within one corpus the (sample_id, annotator_id) pair is unique; several
    annotators may cover the same sample_id, which is how multi-annotator
    annotation rounds are represented.
    """

    samples: tuple[AnnotatedSample, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        seen: set[tuple[str, str]] = set()
        for s in self.samples:
            key = (s.sample_id, s.annotator_id)
            if key in seen:
                raise CorpusError(
                    f"duplicate sample {s.sample_id!r} for annotator {s.annotator_id!r}"
                )
            seen.add(key)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[AnnotatedSample]:
        return iter(self.samples)

    def sample_ids(self) -> list[str]:
        return [s.sample_id for s in self.samples]

    def by_id(self) -> dict[str, AnnotatedSample]:
        """Index by sample_id; requires ids unique across annotators."""
        out: dict[str, AnnotatedSample] = {}
        for s in self.samples:
            if s.sample_id in out:
                raise CorpusError(f"sample_id {s.sample_id!r} not unique in corpus")
            out[s.sample_id] = s
        return out

    def by_annotator(self) -> dict[str, "Corpus"]:
        grouped: dict[str, list[AnnotatedSample]] = {}
        for s in self.samples:
            grouped.setdefault(s.annotator_id, []).append(s)
        return {
            ann: Corpus(tuple(samples), provenance=self.provenance)
            for ann, samples in grouped.items()
        }


# -- JSONL wire format --


def sample_to_record(sample: AnnotatedSample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "annotator_id": sample.annotator_id,
        "source": sample.source.value,
        "text": sample.text,
        "spans": [
            {
                "start": s.start,
                "end": s.end,
                "label": s.label.wire_name,
                "tier2": s.label.tier2.value if s.label.tier2 else None,
            }
            for s in sorted(sample.spans, key=span_sort_key)
        ],
        "meta": dict(sample.meta),
    }


def sample_from_record(record: Mapping, default_source: Source = Source.SYNTHETIC) -> AnnotatedSample:
    """Build a sample from one wire record. Raises ValueError on bad shape."""
    if not isinstance(record, Mapping):
        raise ValueError("record is not an object")
    sample_id = record.get("sample_id")
    text = record.get("text")
    if not isinstance(sample_id, str) or not sample_id:
        raise ValueError("missing or empty sample_id")
    if not isinstance(text, str):
        raise ValueError("missing text")
    annotator = record.get("annotator_id", "")
    if not isinstance(annotator, str):
        raise ValueError("annotator_id must be a string")
    source_name = record.get("source")
    source = Source(source_name) if source_name is not None else default_source
    spans = []
    for raw in record.get("spans") or []:
        start, end = raw["start"], raw["end"]
        if not isinstance(start, int) or not isinstance(end, int):
            raise ValueError("span offsets must be integers")
        tier1 = Tier1.from_wire(raw["label"])
        tier2 = Tier2.from_wire(raw["tier2"]) if raw.get("tier2") else None
        spans.append(Span(start, end, FallacyLabel(tier1, tier2)))
    meta = record.get("meta") or {}
    if not isinstance(meta, Mapping):
        raise ValueError("meta must be an object")
    return AnnotatedSample(
        sample_id=sample_id,
        text=text,
        spans=frozenset(spans),
        annotator_id=annotator,
        source=source,
        meta={str(k): str(v) for k, v in meta.items()},
    )


def write_jsonl(path: Path, samples: Iterable[AnnotatedSample]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_record(sample), ensure_ascii=False) + "\n")


def read_jsonl_records(path: Path) -> list[tuple[int, dict]]:
    """Raw (line_number, record) pairs; blank lines skipped."""
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if line:
                out.append((i, json.loads(line)))
    return out
