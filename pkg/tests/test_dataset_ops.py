"""Ingest, length filter, batch sampling, deterministic splits."""
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, make_sample
from slurg.dataset_ops import (
    IoFailure,
    NotEnoughSamples,
    STANDARD_SPLITS,
    SchemaViolation,
    SplitSpec,
    filter_min_length,
    ingest,
    make_split,
    sample_annotation_batch,
)
from slurg.spans import Corpus, Source


def _write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _record(sid="s1", ann="a1", text="x" * 40, spans=None):
    return json.dumps(
        {
            "sample_id": sid,
            "annotator_id": ann,
            "source": "reddit",
            "text": text,
            "spans": spans or [],
            "meta": {},
        }
    )


def test_ingest_fixture_clean(corpus50):
    assert len(corpus50) == 50
    assert corpus50.by_id()  # ids unique


def test_ingest_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        ingest(tmp_path / "absent.jsonl")


def test_ingest_rejects_bad_lines(tmp_path):
    path = tmp_path / "mixed.jsonl"
    _write_lines(
        path,
        [
            _record("ok1"),
            "not json at all {",
            json.dumps({"sample_id": "bare", "text": "raw comment, no annotator yet"}),
            _record("ok2", spans=[{"start": 0, "end": 999, "label": "logical_fallacy", "tier2": None}]),
            json.dumps({"sample_id": "typed", "text": 12345}),
            _record("ok3"),
        ],
    )
    result = ingest(path)
    # A record without annotator/spans is a legitimate raw comment.
    assert [s.sample_id for s in result.corpus] == ["ok1", "bare", "ok3"]
    assert len(result.rejects) == 3
    reasons = [r.reason for r in result.rejects]
    assert any("json" in reason for reason in reasons)
    assert any("out-of-bounds" in reason for reason in reasons)
    assert [r.line for r in result.rejects] == [2, 4, 5]


def test_ingest_duplicate_identity_raises(tmp_path):
    path = tmp_path / "dup.jsonl"
    _write_lines(path, [_record("s1", "a1"), _record("s1", "a1")])
    with pytest.raises(SchemaViolation):
        ingest(path)


def test_ingest_same_sample_two_annotators_ok(tmp_path):
    path = tmp_path / "multi.jsonl"
    _write_lines(path, [_record("s1", "a1"), _record("s1", "a2")])
    result = ingest(path)
    assert len(result.corpus) == 2


def test_ingest_default_source_applies(tmp_path):
    path = tmp_path / "nosource.jsonl"
    record = json.loads(_record("s1"))
    del record["source"]
    _write_lines(path, [json.dumps(record)])
    result = ingest(path, source=Source.FOURCHAN)
    assert result.corpus.samples[0].source is Source.FOURCHAN


def test_filter_is_strictly_greater():
    s31 = make_sample("x" * 31, sample_id="short31")
    s32 = make_sample("x" * 32, sample_id="exact32")
    s33 = make_sample("x" * 33, sample_id="long33")
    kept = filter_min_length(Corpus((s31, s32, s33)), min_chars=32)
    assert [s.sample_id for s in kept] == ["long33"]


def test_filter_preserves_order(corpus50):
    kept = filter_min_length(corpus50, min_chars=60)
    ids = [s.sample_id for s in kept]
    assert ids == sorted(ids, key=lambda i: corpus50.sample_ids().index(i))
    assert all(len(s.text) > 60 for s in kept)


def test_sample_batch_deterministic(corpus50):
    a = sample_annotation_batch(corpus50, 10, seed=5)
    b = sample_annotation_batch(corpus50, 10, seed=5)
    c = sample_annotation_batch(corpus50, 10, seed=6)
    assert [s.sample_id for s in a] == [s.sample_id for s in b]
    assert [s.sample_id for s in a] != [s.sample_id for s in c]
    assert len(set(s.sample_id for s in a)) == 10


def test_sample_batch_too_large(corpus50):
    with pytest.raises(NotEnoughSamples):
        sample_annotation_batch(corpus50, 51, seed=0)


def test_split_spec_parse():
    spec = SplitSpec.parse("80/20", seed=3)
    assert spec.name == "80/20"
    assert spec.gold_fraction == pytest.approx(0.8)
    assert spec.fewshot_fraction == pytest.approx(0.2)
    assert spec.seed == 3
    with pytest.raises(ValueError):
        SplitSpec.parse("80/30")
    with pytest.raises(ValueError):
        SplitSpec.parse("eighty/twenty")


def test_standard_split_names():
    assert STANDARD_SPLITS == ("100/0", "90/10", "80/20", "70/30")


def _corpus_of(n):
    return Corpus(
        tuple(
            make_sample(f"sample number {i} padded out text", sample_id=f"n{i:03d}")
            for i in range(n)
        )
    )


def test_split_sizes_on_100():
    corpus = _corpus_of(100)
    sizes = {}
    for name in STANDARD_SPLITS:
        split = make_split(corpus, SplitSpec.parse(name, seed=0))
        sizes[name] = (len(split.gold), len(split.fewshot))
    assert sizes == {
        "100/0": (100, 0),
        "90/10": (90, 10),
        "80/20": (80, 20),
        "70/30": (70, 30),
    }


def test_split_round_half_up():
    corpus = _corpus_of(10)
    # 0.25 of 10 = 2.5 rounds up to 3
    split = make_split(corpus, SplitSpec("75/25", 0.75, 0.25, seed=0))
    assert len(split.fewshot) == 3
    assert len(split.gold) == 7


def test_split_disjoint_and_order_preserving():
    corpus = _corpus_of(30)
    split = make_split(corpus, SplitSpec.parse("70/30", seed=9))
    gold_ids = [s.sample_id for s in split.gold]
    few_ids = [s.sample_id for s in split.fewshot]
    assert not (set(gold_ids) & set(few_ids))
    assert sorted(gold_ids + few_ids) == [s.sample_id for s in corpus]
    assert gold_ids == sorted(gold_ids)
    assert few_ids == sorted(few_ids)


def test_split_deterministic_and_seed_sensitive():
    corpus = _corpus_of(40)
    spec = SplitSpec.parse("80/20", seed=4)
    a = make_split(corpus, spec)
    b = make_split(corpus, spec)
    assert [s.sample_id for s in a.fewshot] == [s.sample_id for s in b.fewshot]
    other = make_split(corpus, SplitSpec.parse("80/20", seed=5))
    assert [s.sample_id for s in a.fewshot] != [s.sample_id for s in other.fewshot]


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=1, max_value=200),
    st.integers(min_value=0, max_value=10**6),
    st.sampled_from(STANDARD_SPLITS),
)
def test_split_partition_property(n, seed, name):
    corpus = _corpus_of(n)
    split = make_split(corpus, SplitSpec.parse(name, seed=seed))
    assert len(split.gold) + len(split.fewshot) == n
    ids = [s.sample_id for s in split.gold] + [s.sample_id for s in split.fewshot]
    assert len(set(ids)) == n
    frac = split.spec.fewshot_fraction
    import math

    assert len(split.fewshot) == int(math.floor(frac * n + 0.5))


def test_spec_fractions_must_sum_to_one():
    with pytest.raises(ValueError):
        SplitSpec("60/20", 0.6, 0.2, seed=0)
