"""Span-level strict and relaxed F1 between gold and predicted corpora.

Strict: a predicted span counts only on an exact (start, end, tier-1)
match. Relaxed: within each sample and tier-1 label, gold and predicted
spans are matched one-to-one greedily by descending interval IoU, and each
matched pair contributes its IoU as fractional true-positive mass. Both
metrics are micro-averaged over the corpus, tier-1 only.

A prediction whose text differs from the gold text ("drift", the model
rewrote the sample) scores zero matches for that sample; its gold spans
still count against recall and its predicted spans against precision.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .spans import Corpus, FallacyLabel, Span, Tier1

_LABELS = {t: FallacyLabel(t) for t in Tier1}


class JoinFailure(KeyError):
    pass


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp_mass: float, n_pred: float, n_gold: float) -> "PRF":
        precision = tp_mass / n_pred if n_pred else 0.0
        recall = tp_mass / n_gold if n_gold else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        return cls(precision, recall, f1)


@dataclass(frozen=True)
class EvalReport:
    strict: PRF
    relaxed: PRF
    per_label_strict: Mapping[Tier1, PRF]
    per_label_relaxed: Mapping[Tier1, PRF]
    n_gold_spans: int
    n_pred_spans: int
    drift_count: int
    split_name: str = ""

    def to_json(self) -> str:
        def prf(p: PRF) -> dict:
            return {"precision": p.precision, "recall": p.recall, "f1": p.f1}

        return json.dumps(
            {
                "split": self.split_name,
                "strict": prf(self.strict),
                "relaxed": prf(self.relaxed),
                "per_label": {
                    label.value: {
                        "strict": prf(self.per_label_strict[label]),
                        "relaxed": prf(self.per_label_relaxed[label]),
                    }
                    for label in Tier1
                },
                "n_gold_spans": self.n_gold_spans,
                "n_pred_spans": self.n_pred_spans,
                "drift_count": self.drift_count,
            },
            indent=2,
        )


def reports_to_csv(reports: list[EvalReport]) -> str:
    """One row per split: split, strict F1, relaxed F1."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["split", "strict_f1", "relaxed_f1"])
    for report in reports:
        writer.writerow(
            [report.split_name, f"{report.strict.f1:.4f}", f"{report.relaxed.f1:.4f}"]
        )
    return buf.getvalue()


def span_interval_iou(a: Span, b: Span) -> float:
    inter = max(0, min(a.end, b.end) - max(a.start, b.start))
    union = (a.end - a.start) + (b.end - b.start) - inter
    return inter / union if union else 0.0


def _tier1_keys(spans) -> set[tuple[int, int, Tier1]]:
    return {(s.start, s.end, s.tier1) for s in spans}


def greedy_match(gold: list[Span], pred: list[Span]) -> list[tuple[Span, Span, float]]:
    """One-to-one matching by descending IoU.

    Ties break on earlier gold start, then earlier predicted start (then
    ends, for full determinism). Zero-overlap pairs never match.
    """
    candidates = []
    for g in gold:
        for p in pred:
            iou = span_interval_iou(g, p)
            if iou > 0.0:
                candidates.append((-iou, g.start, g.end, p.start, p.end, g, p))
    candidates.sort(key=lambda c: c[:5])
    matched: list[tuple[Span, Span, float]] = []
    used_gold: set[int] = set()
    used_pred: set[int] = set()
    for neg_iou, *_rest, g, p in candidates:
        if id(g) in used_gold or id(p) in used_pred:
            continue
        used_gold.add(id(g))
        used_pred.add(id(p))
        matched.append((g, p, -neg_iou))
    return matched


@dataclass
class _Tally:
    tp: float = 0.0
    n_pred: int = 0
    n_gold: int = 0

    def prf(self) -> PRF:
        return PRF.from_counts(self.tp, self.n_pred, self.n_gold)


def _evaluate(gold: Corpus, pred: Corpus, relaxed: bool) -> tuple[_Tally, dict[Tier1, _Tally], int]:
    gold_by_id = gold.by_id()
    pred_by_id = pred.by_id()
    missing = set(gold_by_id) ^ set(pred_by_id)
    if missing:
        raise JoinFailure(f"sample ids present on one side only: {sorted(missing)[:5]}")

    total = _Tally()
    per_label = {label: _Tally() for label in Tier1}
    drift = 0
    for sample_id in gold.sample_ids():
        g_sample, p_sample = gold_by_id[sample_id], pred_by_id[sample_id]
        drifted = g_sample.text != p_sample.text
        if drifted:
            drift += 1
        for label in Tier1:
            g_spans = sorted(
                {(s.start, s.end) for s in g_sample.spans if s.tier1 is label}
            )
            p_spans = sorted(
                {(s.start, s.end) for s in p_sample.spans if s.tier1 is label}
            )
            tally = per_label[label]
            tally.n_gold += len(g_spans)
            tally.n_pred += len(p_spans)
            total.n_gold += len(g_spans)
            total.n_pred += len(p_spans)
            if drifted:
                continue
            if relaxed:
                g_objs = [Span(s, e, _LABELS[label]) for s, e in g_spans]
                p_objs = [Span(s, e, _LABELS[label]) for s, e in p_spans]
                mass = sum(iou for _, _, iou in greedy_match(g_objs, p_objs))
            else:
                mass = float(len(set(g_spans) & set(p_spans)))
            tally.tp += mass
            total.tp += mass
    return total, per_label, drift


def strict_f1(gold: Corpus, pred: Corpus) -> PRF:
    total, _, _ = _evaluate(gold, pred, relaxed=False)
    return total.prf()


def relaxed_f1(gold: Corpus, pred: Corpus) -> PRF:
    total, _, _ = _evaluate(gold, pred, relaxed=True)
    return total.prf()


def evaluate_split(gold: Corpus, pred: Corpus, split_name: str = "") -> EvalReport:
    """Full report: both metrics, per-label breakdown, drift count."""
    strict_total, strict_labels, drift = _evaluate(gold, pred, relaxed=False)
    relaxed_total, relaxed_labels, _ = _evaluate(gold, pred, relaxed=True)
    return EvalReport(
        strict=strict_total.prf(),
        relaxed=relaxed_total.prf(),
        per_label_strict={label: t.prf() for label, t in strict_labels.items()},
        per_label_relaxed={label: t.prf() for label, t in relaxed_labels.items()},
        n_gold_spans=strict_total.n_gold,
        n_pred_spans=strict_total.n_pred,
        drift_count=drift,
        split_name=split_name,
    )
