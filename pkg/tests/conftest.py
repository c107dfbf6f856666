"""Shared fixtures and random-sample generators for the test suite."""
import random
from pathlib import Path

import pytest

from slurg.dataset_ops import ingest
from slurg.spans import (
    AnnotatedSample,
    Corpus,
    CREDIBILITY,
    EMOTIONAL,
    LOGICAL,
    Source,
    Span,
)

FIXTURES = Path(__file__).parent / "fixtures"

TIER1_LABELS = (CREDIBILITY, LOGICAL, EMOTIONAL)

# '<' excluded: literal markup inside sample text is not representable in
# the inline tag format, so round-trip properties quantify over tag-free text
_TEXT_ALPHABET = "abcdefghij XYZ.,!?>'0189"


def make_sample(text, spans=(), sample_id="s1", annotator_id="a1",
                source=Source.REDDIT, meta=None):
    return AnnotatedSample(
        sample_id=sample_id,
        text=text,
        spans=frozenset(spans),
        annotator_id=annotator_id,
        source=source,
        meta=meta or {},
    )


def _random_intervals(rng, lo, hi, max_n):
    """Up to max_n disjoint non-empty [a, b) intervals inside [lo, hi)."""
    width = hi - lo
    if width < 1:
        return []
    n = rng.randint(0, max_n)
    n = min(n, width // 1)
    if n == 0:
        return []
    points = rng.sample(range(lo, hi + 1), min(2 * n, width + 1))
    points.sort()
    out = []
    for i in range(0, len(points) - 1, 2):
        a, b = points[i], points[i + 1]
        if a < b:
            out.append((a, b))
    return out


def random_span_set(rng, lo, hi, depth=0):
    """Random valid span forest: disjoint or properly nested, tier-1 labels
    only, same-extent multi-label with small probability."""
    spans = []
    for a, b in _random_intervals(rng, lo, hi, max_n=3 if depth == 0 else 2):
        label = rng.choice(TIER1_LABELS)
        spans.append(Span(a, b, label))
        if rng.random() < 0.2:
            other = rng.choice([l for l in TIER1_LABELS if l is not label])
            spans.append(Span(a, b, other))
        if depth < 3 and rng.random() < 0.6:
            spans.extend(random_span_set(rng, a, b, depth + 1))
    return spans


def random_sample(rng, sample_id="r1", annotator_id="a1"):
    n = rng.randint(1, 80)
    text = "".join(rng.choice(_TEXT_ALPHABET) for _ in range(n))
    return make_sample(
        text,
        random_span_set(rng, 0, n),
        sample_id=sample_id,
        annotator_id=annotator_id,
    )


@pytest.fixture(scope="session")
def corpus50():
    result = ingest(FIXTURES / "forum_comments_50.jsonl")
    assert not result.rejects
    return result.corpus


@pytest.fixture(scope="session")
def pipeline_corpus():
    result = ingest(FIXTURES / "pipeline_annotations.jsonl")
    assert not result.rejects
    return result.corpus


# -- hand-computed agreement fixture --
#
# Four annotators over six samples of length 10; at most one or two spans
# per annotation so every pairwise IoU reduces to small-integer fractions.


def agreement_fixture():
    t10 = "0123456789"
    c, l, e = CREDIBILITY, LOGICAL, EMOTIONAL

    def s(sid, ann, spans):
        return make_sample(t10, spans, sample_id=sid, annotator_id=ann)

    samples = [
        s("s1", "a1", [Span(0, 5, c)]),
        s("s1", "a2", [Span(0, 5, c)]),
        s("s1", "a3", [Span(0, 10, c)]),
        s("s1", "a4", []),
        s("s2", "a1", [Span(0, 10, e)]),
        s("s2", "a2", [Span(0, 10, e)]),
        s("s2", "a3", [Span(0, 10, e)]),
        s("s2", "a4", [Span(5, 10, e)]),
        s("s3", "a1", [Span(2, 8, l)]),
        s("s3", "a2", [Span(4, 6, l)]),
        s("s3", "a3", []),
        s("s3", "a4", [Span(2, 8, c)]),
        s("s4", "a1", []),
        s("s4", "a2", []),
        s("s4", "a3", []),
        s("s4", "a4", []),
        s("s5", "a1", [Span(0, 4, c), Span(0, 4, e)]),
        s("s5", "a2", [Span(0, 4, c), Span(0, 8, e)]),
        s("s6", "a3", [Span(0, 10, l)]),
        s("s6", "a4", [Span(0, 5, l)]),
    ]
    return Corpus(tuple(samples), provenance="agreement-fixture")


# pairwise means derived span by span by hand; see test_agreement for the
# per-sample arithmetic
AGREEMENT_EXPECTED = {
    ("a1", "a2"): 83 / 90,
    ("a1", "a3"): 7 / 8,
    ("a1", "a4"): 17 / 24,
    ("a2", "a3"): 7 / 8,
    ("a2", "a4"): 17 / 24,
    ("a3", "a4"): 4 / 5,
}
