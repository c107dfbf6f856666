"""Review store semantics, exports, and the HTTP surface."""
import json

import pytest
from fastapi.testclient import TestClient

from slurg.agreement import pairwise_agreement
from slurg.review_service import (
    DEFAULT_LIKERT_SCALE,
    LIKERT_CRITERIA,
    OutOfScale,
    ReviewStore,
    TaskKind,
    TaskStatus,
    TextDrift,
    UnknownTask,
    create_app,
)
from slurg.spans import CREDIBILITY, EMOTIONAL, Corpus, Span
from slurg.tag_codec import MalformedMarkup, render_tagged

from conftest import make_sample

REVIEWERS = ["r1", "r2", "r3", "r4"]


def ten_samples(split="80/20") -> Corpus:
    return Corpus(
        [
            make_sample(
                f"sample number {i:02d} talks about the war",
                sample_id=f"s{i:02d}",
                annotator_id="",
                meta={"split_name": split},
            )
            for i in range(10)
        ]
    )


def nested_sample():
    text = "he is a Russian troll so do not listen"
    spans = [Span(0, len(text), EMOTIONAL), Span(8, 21, CREDIBILITY)]
    return make_sample(text, spans, sample_id="n1", annotator_id="")


@pytest.fixture
def store(tmp_path):
    return ReviewStore(tmp_path / "events.jsonl")


# -- enqueue --


def test_enqueue_ten_by_four(store):
    assert store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, REVIEWERS) == 40
    assert len(store.tasks()) == 40


def test_enqueue_idempotent(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, REVIEWERS)
    assert store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, REVIEWERS) == 40
    assert len(store.tasks()) == 40


def test_enqueue_empty_reviewers(store):
    assert store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, []) == 0
    assert store.tasks() == []


def test_task_ids_and_sorting(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r2", "r1"])
    tasks = store.tasks()
    assert tasks[0].task_id == "span_annotation:r1:s00"
    assert [t.task_id for t in tasks] == sorted(t.task_id for t in tasks)


def test_task_filters(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1", "r2"])
    store.enqueue_tasks(Corpus([nested_sample()]), TaskKind.LIKERT_REVIEW, ["r1"])
    assert len(store.tasks(reviewer="r1")) == 11
    assert len(store.tasks(kind=TaskKind.LIKERT_REVIEW)) == 1
    assert len(store.tasks(status=TaskStatus.DONE)) == 0
    assert len(store.tasks(reviewer="r1", kind=TaskKind.SPAN_ANNOTATION)) == 10


def test_likert_task_payload_carries_spans(store):
    store.enqueue_tasks(Corpus([nested_sample()]), TaskKind.LIKERT_REVIEW, ["r1"])
    store.enqueue_tasks(Corpus([nested_sample()]), TaskKind.SPAN_ANNOTATION, ["r1"])
    likert = store.get_task("likert_review:r1:n1").to_payload()
    annot = store.get_task("span_annotation:r1:n1").to_payload()
    assert len(likert["spans"]) == 2
    assert "spans" not in annot


# -- annotation submission --


def test_submit_annotation_round_trips(store):
    sample = nested_sample()
    store.enqueue_tasks(Corpus([sample]), TaskKind.SPAN_ANNOTATION, ["r1"])
    tagged = render_tagged(sample)
    stored = store.submit_annotation("span_annotation:r1:n1", tagged)
    assert stored.annotator_id == "r1"
    assert stored.spans == sample.spans
    assert store.get_task("span_annotation:r1:n1").status is TaskStatus.DONE
    exported = list(store.export_annotations())
    assert len(exported) == 1
    assert exported[0].spans == sample.spans
    assert "split_name" not in exported[0].meta


def test_submitted_annotation_keeps_split(store):
    store.enqueue_tasks(ten_samples(split="90/10"), TaskKind.SPAN_ANNOTATION, ["r1"])
    task = store.tasks(reviewer="r1")[0]
    stored = store.submit_annotation(task.task_id, task.text)
    assert stored.meta["split_name"] == "90/10"


def test_submit_annotation_no_spans_is_valid(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1"])
    task = store.tasks(reviewer="r1")[0]
    stored = store.submit_annotation(task.task_id, task.text)
    assert stored.spans == frozenset()


def test_submit_annotation_strict_markup(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1"])
    task = store.tasks(reviewer="r1")[0]
    with pytest.raises(MalformedMarkup):
        store.submit_annotation(task.task_id, f"<emotional_fallacy>{task.text}")


def test_submit_annotation_text_drift(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1"])
    task = store.tasks(reviewer="r1")[0]
    with pytest.raises(TextDrift):
        store.submit_annotation(task.task_id, task.text + " extra words")
    assert store.get_task(task.task_id).status is TaskStatus.PENDING


def test_submit_annotation_unknown_task(store):
    with pytest.raises(UnknownTask):
        store.submit_annotation("span_annotation:r9:s99", "text")


def test_submit_annotation_wrong_kind(store):
    store.enqueue_tasks(Corpus([nested_sample()]), TaskKind.LIKERT_REVIEW, ["r1"])
    with pytest.raises(UnknownTask):
        store.submit_annotation("likert_review:r1:n1", "whatever")


def test_resubmission_overwrites(store):
    sample = nested_sample()
    store.enqueue_tasks(Corpus([sample]), TaskKind.SPAN_ANNOTATION, ["r1"])
    task_id = "span_annotation:r1:n1"
    store.submit_annotation(task_id, render_tagged(sample))
    store.submit_annotation(task_id, sample.text)  # second pass: no spans
    exported = list(store.export_annotations())
    assert len(exported) == 1
    assert exported[0].spans == frozenset()
    assert store.get_task(task_id).status is TaskStatus.DONE


# -- likert submission --


def likert_store(store):
    samples = Corpus(
        [
            make_sample("first generated comment", sample_id="g1", annotator_id="",
                        meta={"split_name": "80/20"}),
            make_sample("second generated comment", sample_id="g2", annotator_id="",
                        meta={"split_name": "80/20"}),
            make_sample("third generated comment", sample_id="g3", annotator_id="",
                        meta={"split_name": "70/30"}),
        ]
    )
    store.enqueue_tasks(samples, TaskKind.LIKERT_REVIEW, ["r1", "r2"])
    return store


def test_submit_likert_stored(store):
    likert_store(store)
    score = store.submit_likert("likert_review:r1:g1", 4, 4, 4)
    assert score.values() == {"realism": 4, "fallacy_accuracy": 4, "span_accuracy": 4}
    assert store.get_task("likert_review:r1:g1").status is TaskStatus.DONE


@pytest.mark.parametrize("values", [(5, 4, 4), (4, 0, 4), (4, 4, -1), (4, "3", 4), (True, 4, 4)])
def test_submit_likert_out_of_scale(store, values):
    likert_store(store)
    with pytest.raises(OutOfScale):
        store.submit_likert("likert_review:r1:g1", *values)


def test_submit_likert_wrong_kind(store):
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1"])
    with pytest.raises(UnknownTask):
        store.submit_likert("span_annotation:r1:s00", 4, 4, 4)


def test_likert_custom_scale(tmp_path):
    wide = ReviewStore(tmp_path / "wide.jsonl", likert_scale=6)
    wide.enqueue_tasks(Corpus([nested_sample()]), TaskKind.LIKERT_REVIEW, ["r1"])
    wide.submit_likert("likert_review:r1:n1", 6, 5, 1)
    with pytest.raises(OutOfScale):
        wide.submit_likert("likert_review:r1:n1", 7, 1, 1)


def test_likert_scale_validation(tmp_path):
    with pytest.raises(ValueError):
        ReviewStore(tmp_path / "x.jsonl", likert_scale=1)


# -- likert export and means --


def seeded_scores(store):
    likert_store(store)
    store.submit_likert("likert_review:r1:g1", 4, 3, 2)
    store.submit_likert("likert_review:r2:g1", 2, 3, 4)
    store.submit_likert("likert_review:r1:g2", 3, 4, 1)
    store.submit_likert("likert_review:r1:g3", 1, 2, 3)
    return store


def test_likert_rows_csv(store):
    seeded_scores(store)
    lines = store.likert_rows_csv().splitlines()
    assert lines[0] == "split,reviewer,criterion,value"
    # scores ordered by task_id: r1:g1, r1:g2, r1:g3, r2:g1
    assert lines[1:4] == [
        "80/20,r1,realism,4",
        "80/20,r1,fallacy_accuracy,3",
        "80/20,r1,span_accuracy,2",
    ]
    assert len(lines) == 1 + 4 * 3


def test_likert_means_hand_arithmetic(store):
    seeded_scores(store)
    means = store.likert_means()
    # 80/20: realism (4+2+3)/3, fallacy (3+3+4)/3, span (2+4+1)/3
    assert means["80/20"]["realism"] == pytest.approx(3.0)
    assert means["80/20"]["fallacy_accuracy"] == pytest.approx(10 / 3)
    assert means["80/20"]["span_accuracy"] == pytest.approx(7 / 3)
    # 70/30 has a single score
    assert means["70/30"] == {"realism": 1, "fallacy_accuracy": 2, "span_accuracy": 3}


def test_likert_means_csv(store):
    seeded_scores(store)
    lines = store.likert_means_csv().splitlines()
    assert lines[0] == "split,criterion,mean"
    assert f"80/20,fallacy_accuracy,{10 / 3:.6f}" in lines
    assert "70/30,realism,1.000000" in lines


def test_likert_overwrite_last_wins(store):
    seeded_scores(store)
    store.submit_likert("likert_review:r1:g1", 1, 1, 1)
    scores = {(s.reviewer_id, s.sample_id): s for s in store.likert_scores()}
    assert scores[("r1", "g1")].realism == 1
    assert len(store.likert_scores()) == 4


def test_empty_exports(store):
    assert len(store.export_annotations()) == 0
    assert store.likert_rows_csv() == "split,reviewer,criterion,value\n"
    assert store.likert_means() == {}


# -- persistence --


def test_replay_from_disk(tmp_path):
    path = tmp_path / "events.jsonl"
    first = ReviewStore(path, likert_scale=6)
    sample = nested_sample()
    first.enqueue_tasks(Corpus([sample]), TaskKind.SPAN_ANNOTATION, ["r1", "r2"])
    first.enqueue_tasks(Corpus([sample]), TaskKind.LIKERT_REVIEW, ["r1"])
    first.submit_annotation("span_annotation:r1:n1", render_tagged(sample))
    first.submit_likert("likert_review:r1:n1", 6, 1, 3)

    second = ReviewStore(path)
    assert second.likert_scale == 6  # config event wins over constructor default
    assert len(second.tasks()) == 3
    assert second.get_task("span_annotation:r1:n1").status is TaskStatus.DONE
    assert list(second.export_annotations()) == list(first.export_annotations())
    assert second.likert_scores() == first.likert_scores()


def test_store_is_append_only(tmp_path):
    path = tmp_path / "events.jsonl"
    store = ReviewStore(path)
    sample = nested_sample()
    store.enqueue_tasks(Corpus([sample]), TaskKind.SPAN_ANNOTATION, ["r1"])
    store.submit_annotation("span_annotation:r1:n1", render_tagged(sample))
    lines_before = path.read_text(encoding="utf-8").splitlines()
    store.submit_annotation("span_annotation:r1:n1", sample.text)
    lines_after = path.read_text(encoding="utf-8").splitlines()
    assert lines_after[: len(lines_before)] == lines_before
    assert len(lines_after) == len(lines_before) + 1


# -- feeds the agreement module --


def test_export_feeds_agreement(store):
    sample = nested_sample()
    store.enqueue_tasks(Corpus([sample]), TaskKind.SPAN_ANNOTATION, ["r1", "r2"])
    store.submit_annotation("span_annotation:r1:n1", render_tagged(sample))
    store.submit_annotation("span_annotation:r2:n1", render_tagged(sample))
    report = pairwise_agreement(store.export_annotations())
    assert report.pair_scores[("r1", "r2")].overall == pytest.approx(1.0)


# -- progress --


def test_progress(store):
    seeded_scores(store)
    snapshot = store.progress()
    assert snapshot["total"] == 6
    assert snapshot["done"] == 4
    assert snapshot["by_kind"]["likert_review"] == {"pending": 2, "done": 4}
    assert snapshot["likert_scale"] == DEFAULT_LIKERT_SCALE


# -- HTTP surface --


@pytest.fixture
def client(store):
    sample = nested_sample()
    store.enqueue_tasks(ten_samples(), TaskKind.SPAN_ANNOTATION, ["r1", "r2"])
    store.enqueue_tasks(Corpus([sample]), TaskKind.LIKERT_REVIEW, ["r1"])
    return TestClient(create_app(store))


def test_http_list_tasks(client):
    resp = client.get("/api/tasks", params={"reviewer": "r1", "kind": "span_annotation"})
    assert resp.status_code == 200
    payload = resp.json()
    assert len(payload["tasks"]) == 10
    assert payload["likert_scale"] == DEFAULT_LIKERT_SCALE
    assert all(t["reviewer_id"] == "r1" for t in payload["tasks"])


def test_http_list_tasks_bad_kind(client):
    assert client.get("/api/tasks", params={"kind": "nonsense"}).status_code == 400
    assert client.get("/api/tasks", params={"status": "nonsense"}).status_code == 400


def test_http_get_sample(client):
    resp = client.get("/api/samples/n1")
    assert resp.status_code == 200
    assert resp.json()["sample_id"] == "n1"
    assert client.get("/api/samples/zzz").status_code == 404


def test_http_post_annotation_happy(client):
    task = client.get("/api/tasks", params={"reviewer": "r1", "kind": "span_annotation"}).json()[
        "tasks"
    ][0]
    tagged = f"<emotional_fallacy>{task['text']}</emotional_fallacy>"
    resp = client.post("/api/annotations", json={"task_id": task["task_id"], "tagged": tagged})
    assert resp.status_code == 200
    record = resp.json()["stored"]
    assert record["annotator_id"] == "r1"
    assert len(record["spans"]) == 1
    assert record["spans"][0]["label"] == "emotional_fallacy"


def test_http_post_annotation_errors(client):
    assert client.post("/api/annotations", json={"task_id": "x"}).status_code == 400
    assert (
        client.post(
            "/api/annotations", json={"task_id": "span_annotation:r9:s99", "tagged": "t"}
        ).status_code
        == 404
    )
    task = client.get("/api/tasks", params={"reviewer": "r1", "kind": "span_annotation"}).json()[
        "tasks"
    ][0]
    malformed = client.post(
        "/api/annotations",
        json={"task_id": task["task_id"], "tagged": f"<emotional_fallacy>{task['text']}"},
    )
    assert malformed.status_code == 400
    drifted = client.post(
        "/api/annotations",
        json={"task_id": task["task_id"], "tagged": task["text"] + " tampered"},
    )
    assert drifted.status_code == 409


def test_http_post_likert(client):
    body = {"task_id": "likert_review:r1:n1", "realism": 4, "fallacy_accuracy": 4,
            "span_accuracy": 4}
    resp = client.post("/api/likert", json=body)
    assert resp.status_code == 200
    assert resp.json()["stored"]["realism"] == 4
    out_of_scale = client.post("/api/likert", json=body | {"realism": 5})
    assert out_of_scale.status_code == 400
    unknown = client.post("/api/likert", json=body | {"task_id": "likert_review:r9:zz"})
    assert unknown.status_code == 404
    missing = client.post("/api/likert", json={"realism": 4})
    assert missing.status_code == 400


def test_http_export_annotations_ndjson(client, store):
    task = store.tasks(reviewer="r1", kind=TaskKind.SPAN_ANNOTATION)[0]
    store.submit_annotation(task.task_id, task.text)
    resp = client.get("/api/export", params={"kind": "span_annotation"})
    assert resp.status_code == 200
    lines = [json.loads(l) for l in resp.text.splitlines() if l]
    assert len(lines) == 1
    assert lines[0]["sample_id"] == task.sample_id


def test_http_export_likert(client, store):
    store.submit_likert("likert_review:r1:n1", 4, 4, 4)
    rows = client.get("/api/export", params={"kind": "likert_review"})
    assert rows.text.splitlines()[0] == "split,reviewer,criterion,value"
    means = client.get("/api/export", params={"kind": "likert_review", "table": "means"})
    assert means.text.splitlines()[0] == "split,criterion,mean"
    assert client.get("/api/export", params={"kind": "bogus"}).status_code == 400


def test_http_progress(client):
    resp = client.get("/api/progress")
    assert resp.status_code == 200
    assert resp.json()["total"] == 21


def test_http_serves_static_ui(tmp_path, store):
    static = tmp_path / "ui"
    static.mkdir()
    (static / "index.html").write_text("<html><body>review ui</body></html>", encoding="utf-8")
    client = TestClient(create_app(store, static_dir=static))
    resp = client.get("/")
    assert resp.status_code == 200
    assert "review ui" in resp.text
