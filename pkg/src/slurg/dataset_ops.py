"""Corpus ingestion, filtering, batch assembly, and gold/few-shot splits.

Scraped forum data is dirty, so ingest quarantines bad lines into a
rejects report instead of failing the run; only cross-record problems
(duplicate identity) abort, since they poison corpus identity.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .spans import AnnotatedSample, Corpus, Source, sample_from_record, validate_sample


class IoFailure(OSError):
    pass


class SchemaViolation(ValueError):
    def __init__(self, line: int, detail: str):
        self.line = line
        self.detail = detail
        super().__init__(f"line {line}: {detail}")


class NotEnoughSamples(ValueError):
    pass


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str
    raw: str


@dataclass(frozen=True)
class IngestResult:
    corpus: Corpus
    rejects: tuple[Reject, ...]


def ingest(path: Path, source: Source = Source.REDDIT) -> IngestResult:
    """Load a JSONL corpus; invalid lines land in the rejects report.

    `source` applies to records that do not carry their own source field.
    A duplicate (sample_id, annotator_id) raises SchemaViolation: the rest
    of the pipeline needs corpus identity to be unambiguous.
    """
    path = Path(path)
    if not path.exists():
        raise IoFailure(f"no such file: {path}")
    samples: list[AnnotatedSample] = []
    rejects: list[Reject] = []
    seen: dict[tuple[str, str], int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            raw = line.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                rejects.append(Reject(line_no, f"bad json: {exc.msg}", raw))
                continue
            try:
                sample = sample_from_record(record, default_source=source)
            except (ValueError, KeyError, TypeError) as exc:
                rejects.append(Reject(line_no, f"bad record: {exc}", raw))
                continue
            violations = validate_sample(sample)
            if violations:
                reasons = "; ".join(f"{v.kind}: {v.detail}" for v in violations)
                rejects.append(Reject(line_no, reasons, raw))
                continue
            key = (sample.sample_id, sample.annotator_id)
            if key in seen:
                raise SchemaViolation(
                    line_no,
                    f"duplicate sample_id {sample.sample_id!r} "
                    f"(annotator {sample.annotator_id!r}, first seen line {seen[key]})",
                )
            seen[key] = line_no
            samples.append(sample)
    return IngestResult(
        corpus=Corpus(tuple(samples), provenance=str(path)),
        rejects=tuple(rejects),
    )


def filter_min_length(corpus: Corpus, min_chars: int = 32) -> Corpus:
    """Keep samples strictly longer than min_chars characters."""
    kept = tuple(s for s in corpus if len(s.text) > min_chars)
    return Corpus(kept, provenance=f"{corpus.provenance}|minlen>{min_chars}")


def sample_annotation_batch(corpus: Corpus, n: int, seed: int = 0) -> Corpus:
    """Uniform sample of n items without replacement, deterministic by seed."""
    if n > len(corpus):
        raise NotEnoughSamples(f"requested {n} of {len(corpus)} samples")
    rng = random.Random(seed)
    batch = rng.sample(list(corpus.samples), n)
    return Corpus(tuple(batch), provenance=f"{corpus.provenance}|batch(n={n},seed={seed})")


@dataclass(frozen=True)
class SplitSpec:
    name: str
    gold_fraction: float
    fewshot_fraction: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.gold_fraction < 0 or self.fewshot_fraction < 0:
            raise ValueError("fractions must be non-negative")
        if abs(self.gold_fraction + self.fewshot_fraction - 1.0) > 1e-9:
            raise ValueError("fractions must sum to 1")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "SplitSpec":
        """Parse a "gold/fewshot" percentage pair like "80/20"."""
        try:
            gold_pct, few_pct = (float(part) for part in text.split("/"))
        except ValueError as exc:
            raise ValueError(f"bad split spec {text!r}, expected like '80/20'") from exc
        return cls(
            name=text,
            gold_fraction=gold_pct / 100.0,
            fewshot_fraction=few_pct / 100.0,
            seed=seed,
        )


STANDARD_SPLITS = ("100/0", "90/10", "80/20", "70/30")


@dataclass(frozen=True)
class Split:
    gold: Corpus
    fewshot: Corpus
    spec: SplitSpec


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def make_split(gold_corpus: Corpus, spec: SplitSpec) -> Split:
    """Partition a corpus into gold and few-shot halves.

    Few-shot size is round-half-up(fraction * N); membership is a seeded
    uniform draw; both halves keep the input's internal order.
    """
    n = len(gold_corpus)
    n_few = _round_half_up(spec.fewshot_fraction * n)
    rng = random.Random(spec.seed)
    few_idx = set(rng.sample(range(n), n_few))
    few = tuple(s for i, s in enumerate(gold_corpus) if i in few_idx)
    gold = tuple(s for i, s in enumerate(gold_corpus) if i not in few_idx)
    base = gold_corpus.provenance
    return Split(
        gold=Corpus(gold, provenance=f"{base}|gold({spec.name})"),
        fewshot=Corpus(few, provenance=f"{base}|fewshot({spec.name})"),
        spec=spec,
    )
