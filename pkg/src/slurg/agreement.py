"""Inter-annotator agreement over labeled spans.

Agreement between two annotators on one sample and one tier-1 label is the
Jaccard index IoU(A, B) = |A n B| / |A u B| over the character sets each
annotator covered with that label. When neither covered anything the pair
gets perfect agreement, 1.0. A pair's score on a sample is the mean IoU
over the three tier-1 labels; a pair's overall score is the unweighted
mean over the samples both annotated.

The production path runs on merged coverage intervals; ``label_mask`` plus
``jaccard_iou`` give the per-character bitset route used as its oracle.
"""
from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .spans import AnnotatedSample, Corpus, Tier1

Interval = tuple[int, int]


class LengthMismatch(ValueError):
    pass


class TextMismatch(ValueError):
    def __init__(self, sample_id: str, annotators: tuple[str, str]):
        self.sample_id = sample_id
        self.annotators = annotators
        super().__init__(
            f"annotators {annotators[0]!r} and {annotators[1]!r} stored different "
            f"texts for sample {sample_id!r}"
        )


class NoSharedSamples(ValueError):
    pass


def label_mask(sample: AnnotatedSample, label: Tier1) -> np.ndarray:
    """Per-character boolean coverage vector for one tier-1 label."""
    bits = np.zeros(len(sample.text), dtype=bool)
    for span in sample.spans:
        if span.tier1 is label:
            bits[span.start : span.end] = True
    return bits


def jaccard_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Bitset Jaccard index; both-empty pairs score 1.0."""
    if len(a) != len(b):
        raise LengthMismatch(f"mask lengths differ: {len(a)} vs {len(b)}")
    union = int(np.count_nonzero(a | b))
    if union == 0:
        return 1.0
    inter = int(np.count_nonzero(a & b))
    return inter / union


def merge_intervals(intervals: Iterable[Interval]) -> list[Interval]:
    """Union of half-open intervals as a sorted disjoint list."""
    merged: list[list[int]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


def _coverage(sample: AnnotatedSample, label: Tier1) -> list[Interval]:
    return merge_intervals(
        (s.start, s.end) for s in sample.spans if s.tier1 is label
    )


def interval_iou(a: Sequence[Interval], b: Sequence[Interval]) -> float:
    """Jaccard index via interval arithmetic; exact match for the bitset route.

    Inputs must each be sorted and disjoint (merge_intervals output).
    """
    len_a = sum(e - s for s, e in a)
    len_b = sum(e - s for s, e in b)
    inter = 0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            inter += hi - lo
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    union = len_a + len_b - inter
    if union == 0:
        return 1.0
    return inter / union


def sample_pair_iou(a: AnnotatedSample, b: AnnotatedSample) -> dict[Tier1, float]:
    """Per-label IoU between two annotators' versions of the same text."""
    if a.text != b.text:
        raise TextMismatch(a.sample_id, (a.annotator_id, b.annotator_id))
    return {
        label: interval_iou(_coverage(a, label), _coverage(b, label))
        for label in Tier1
    }


@dataclass(frozen=True)
class PairScore:
    per_label: Mapping[Tier1, float]  # mean over shared samples, per label
    overall: float  # mean over shared samples of per-sample label means
    n_shared: int


@dataclass(frozen=True)
class AgreementReport:
    annotators: tuple[str, ...]
    pair_scores: Mapping[tuple[str, str], PairScore]
    per_sample: Mapping[str, Mapping[tuple[str, str], Mapping[Tier1, float]]]

    def matrix(self) -> list[list[float | None]]:
        """Symmetric annotator x annotator overall means, unit diagonal."""
        out: list[list[float | None]] = []
        for a in self.annotators:
            row: list[float | None] = []
            for b in self.annotators:
                if a == b:
                    row.append(1.0)
                else:
                    key = (a, b) if (a, b) in self.pair_scores else (b, a)
                    score = self.pair_scores.get(key)
                    row.append(score.overall if score else None)
            out.append(row)
        return out

    def mean_agreement_of(self, annotator: str) -> float:
        scores = [
            s.overall
            for pair, s in self.pair_scores.items()
            if annotator in pair
        ]
        return sum(scores) / len(scores) if scores else float("nan")

    def to_json(self) -> str:
        payload = {
            "annotators": list(self.annotators),
            "pairs": [
                {
                    "a": a,
                    "b": b,
                    "overall": score.overall,
                    "n_shared": score.n_shared,
                    "per_label": {t.value: v for t, v in score.per_label.items()},
                }
                for (a, b), score in sorted(self.pair_scores.items())
            ],
            "matrix": self.matrix(),
        }
        return json.dumps(payload, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([""] + list(self.annotators))
        for name, row in zip(self.annotators, self.matrix()):
            writer.writerow([name] + ["" if v is None else f"{v:.6f}" for v in row])
        return buf.getvalue()


def _grouped(annotations: Union[Corpus, Mapping[str, Corpus]]) -> dict[str, Corpus]:
    if isinstance(annotations, Corpus):
        return annotations.by_annotator()
    return dict(annotations)


def pairwise_agreement(annotations: Union[Corpus, Mapping[str, Corpus]]) -> AgreementReport:
    """Agreement report across all annotator pairs sharing at least one sample.

    Accepts a flat multi-annotator corpus (grouped by annotator_id) or an
    explicit annotator-to-corpus mapping. Raises NoSharedSamples when no
    pair of annotators annotated a common sample.
    """
    groups = _grouped(annotations)
    annotators = tuple(sorted(groups))
    indexed = {ann: groups[ann].by_id() for ann in annotators}

    pair_scores: dict[tuple[str, str], PairScore] = {}
    per_sample: dict[str, dict[tuple[str, str], dict[Tier1, float]]] = {}
    for i, a in enumerate(annotators):
        for b in annotators[i + 1 :]:
            shared = sorted(set(indexed[a]) & set(indexed[b]))
            if not shared:
                continue
            label_totals = {label: 0.0 for label in Tier1}
            overall_total = 0.0
            for sample_id in shared:
                per_label = sample_pair_iou(indexed[a][sample_id], indexed[b][sample_id])
                per_sample.setdefault(sample_id, {})[(a, b)] = per_label
                for label, value in per_label.items():
                    label_totals[label] += value
                overall_total += sum(per_label.values()) / len(per_label)
            n = len(shared)
            pair_scores[(a, b)] = PairScore(
                per_label={label: total / n for label, total in label_totals.items()},
                overall=overall_total / n,
                n_shared=n,
            )
    if not pair_scores:
        raise NoSharedSamples("no two annotators share a sample")
    return AgreementReport(
        annotators=annotators, pair_scores=pair_scores, per_sample=per_sample
    )


def sample_agreement_means(
    annotations: Union[Corpus, Mapping[str, Corpus]],
) -> dict[str, float]:
    """Per-sample agreement: mean over annotator pairs of per-sample label means."""
    report = pairwise_agreement(annotations)
    out: dict[str, float] = {}
    for sample_id, by_pair in report.per_sample.items():
        pair_means = [
            sum(per_label.values()) / len(per_label) for per_label in by_pair.values()
        ]
        out[sample_id] = sum(pair_means) / len(pair_means)
    return out


def select_gold(
    annotations: Union[Corpus, Mapping[str, Corpus]],
    threshold: float = 0.80,
    rng_seed: int = 0,
) -> Corpus:
    """Keep samples whose mean pairwise agreement strictly exceeds threshold,
    choosing one annotator's version uniformly at random (seeded).

    Samples covered by fewer than two annotators have no agreement score and
    are never selected. Deterministic given (annotations, threshold, seed).
    """
    groups = _grouped(annotations)
    means = sample_agreement_means(groups)
    rng = random.Random(rng_seed)
    chosen: list[AnnotatedSample] = []
    for sample_id in sorted(means):
        if means[sample_id] <= threshold:
            continue
        candidates = sorted(
            ann for ann, corpus in groups.items()
            if sample_id in {s.sample_id for s in corpus}
        )
        winner = rng.choice(candidates)
        chosen.append(next(s for s in groups[winner] if s.sample_id == sample_id))
    return Corpus(
        tuple(chosen),
        provenance=f"gold(threshold={threshold},seed={rng_seed})",
    )
