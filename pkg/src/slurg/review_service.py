"""Local HTTP service backing human review: span-annotation and Likert tasks.

The store is an append-only JSONL event log with an in-memory index rebuilt
at startup; the last record per task wins. Annotation submissions must parse
strictly and reproduce the sample text byte for byte, so everything exported
from here round-trips through the tag codec. Likert scores live on an
even-point scale (default 4) so reviewers cannot camp on a midpoint.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from statistics import mean
from typing import Iterable, Optional

from .spans import AnnotatedSample, Corpus, sample_from_record, sample_to_record
from .tag_codec import MalformedMarkup, Strictness, parse_tagged

DEFAULT_LIKERT_SCALE = 4

LIKERT_CRITERIA = ("realism", "fallacy_accuracy", "span_accuracy")


class TaskKind(str, Enum):
    SPAN_ANNOTATION = "span_annotation"
    LIKERT_REVIEW = "likert_review"


class TaskStatus(str, Enum):
    PENDING = "pending"
    DONE = "done"


class UnknownTask(KeyError):
    pass


class TextDrift(ValueError):
    pass


class OutOfScale(ValueError):
    pass


@dataclass(frozen=True)
class ReviewTask:
    task_id: str
    sample_id: str
    reviewer_id: str
    kind: TaskKind
    status: TaskStatus
    text: str
    spans: tuple[dict, ...] = ()
    split: str = ""

    def to_payload(self) -> dict:
        payload = {
            "task_id": self.task_id,
            "sample_id": self.sample_id,
            "reviewer_id": self.reviewer_id,
            "kind": self.kind.value,
            "status": self.status.value,
            "text": self.text,
            "split": self.split,
        }
        if self.kind is TaskKind.LIKERT_REVIEW:
            payload["spans"] = list(self.spans)
        return payload


@dataclass(frozen=True)
class LikertScore:
    sample_id: str
    reviewer_id: str
    realism: int
    fallacy_accuracy: int
    span_accuracy: int
    split: str = ""

    def values(self) -> dict[str, int]:
        return {
            "realism": self.realism,
            "fallacy_accuracy": self.fallacy_accuracy,
            "span_accuracy": self.span_accuracy,
        }


def _task_id(kind: TaskKind, reviewer_id: str, sample_id: str) -> str:
    return f"{kind.value}:{reviewer_id}:{sample_id}"


class ReviewStore:
    """Append-only event log plus the index replayed from it.

    Event types: config (scale), task, annotation, likert. A single lock
    serializes writes and snapshots reads.
    """

    def __init__(self, path: Path, likert_scale: int = DEFAULT_LIKERT_SCALE):
        if likert_scale < 2:
            raise ValueError("likert_scale must be at least 2")
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.likert_scale = likert_scale
        self._lock = threading.Lock()
        self._tasks: dict[str, ReviewTask] = {}
        self._annotations: dict[str, dict] = {}
        self._likert: dict[str, LikertScore] = {}
        self._replay()

    # -- persistence --

    def _replay(self) -> None:
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                self._apply(event)

    def _apply(self, event: dict) -> None:
        etype = event.get("type")
        if etype == "config":
            self.likert_scale = int(event["likert_scale"])
        elif etype == "task":
            task = ReviewTask(
                task_id=event["task_id"],
                sample_id=event["sample_id"],
                reviewer_id=event["reviewer_id"],
                kind=TaskKind(event["kind"]),
                status=TaskStatus(event.get("status", "pending")),
                text=event["text"],
                spans=tuple(event.get("spans", [])),
                split=event.get("split", ""),
            )
            self._tasks[task.task_id] = task
        elif etype == "annotation":
            task_id = event["task_id"]
            self._annotations[task_id] = event["record"]
            self._mark_done(task_id)
        elif etype == "likert":
            task_id = event["task_id"]
            self._likert[task_id] = LikertScore(
                sample_id=event["sample_id"],
                reviewer_id=event["reviewer_id"],
                realism=event["realism"],
                fallacy_accuracy=event["fallacy_accuracy"],
                span_accuracy=event["span_accuracy"],
                split=event.get("split", ""),
            )
            self._mark_done(task_id)

    def _mark_done(self, task_id: str) -> None:
        task = self._tasks.get(task_id)
        if task is not None and task.status is not TaskStatus.DONE:
            self._tasks[task_id] = ReviewTask(
                task_id=task.task_id,
                sample_id=task.sample_id,
                reviewer_id=task.reviewer_id,
                kind=task.kind,
                status=TaskStatus.DONE,
                text=task.text,
                spans=task.spans,
                split=task.split,
            )

    def _append(self, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        self._apply(event)

    # -- task management --

    def enqueue_tasks(
        self, corpus: Corpus, kind: TaskKind, reviewers: Iterable[str]
    ) -> int:
        """Create one task per (sample, reviewer); re-enqueueing is a no-op.

        Returns how many of the requested pairs now have a task.
        """
        reviewer_list = list(reviewers)
        with self._lock:
            if not self._tasks and not self.path.exists():
                self._append({"type": "config", "likert_scale": self.likert_scale})
            count = 0
            for sample in sorted(corpus, key=lambda s: s.sample_id):
                record = sample_to_record(sample)
                for reviewer in reviewer_list:
                    task_id = _task_id(kind, reviewer, sample.sample_id)
                    count += 1
                    if task_id in self._tasks:
                        continue
                    spans = record["spans"] if kind is TaskKind.LIKERT_REVIEW else []
                    self._append(
                        {
                            "type": "task",
                            "task_id": task_id,
                            "sample_id": sample.sample_id,
                            "reviewer_id": reviewer,
                            "kind": kind.value,
                            "status": "pending",
                            "text": sample.text,
                            "spans": spans,
                            "split": sample.meta.get("split_name", ""),
                        }
                    )
            return count

    def tasks(
        self,
        reviewer: Optional[str] = None,
        kind: Optional[TaskKind] = None,
        status: Optional[TaskStatus] = None,
    ) -> list[ReviewTask]:
        with self._lock:
            found = sorted(self._tasks.values(), key=lambda t: t.task_id)
        if reviewer is not None:
            found = [t for t in found if t.reviewer_id == reviewer]
        if kind is not None:
            found = [t for t in found if t.kind is kind]
        if status is not None:
            found = [t for t in found if t.status is status]
        return found

    def get_task(self, task_id: str) -> ReviewTask:
        with self._lock:
            task = self._tasks.get(task_id)
        if task is None:
            raise UnknownTask(task_id)
        return task

    def get_sample(self, sample_id: str) -> dict:
        with self._lock:
            for task in self._tasks.values():
                if task.sample_id == sample_id:
                    return {
                        "sample_id": task.sample_id,
                        "text": task.text,
                        "spans": list(task.spans),
                        "split": task.split,
                    }
        raise UnknownTask(sample_id)

    # -- submissions --

    def submit_annotation(self, task_id: str, tagged: str) -> AnnotatedSample:
        """Strict-parse a tagged submission and persist it for the task.

        The de-tagged text must equal the task's sample text exactly;
        resubmission overwrites (last record wins).
        """
        task = self.get_task(task_id)
        if task.kind is not TaskKind.SPAN_ANNOTATION:
            raise UnknownTask(f"{task_id} is not a span_annotation task")
        report = parse_tagged(
            tagged,
            Strictness.STRICT,
            sample_id=task.sample_id,
            annotator_id=task.reviewer_id,
        )
        if report.sample.text != task.text:
            raise TextDrift(
                f"submission text does not match sample {task.sample_id}"
            )
        stored = AnnotatedSample(
            sample_id=task.sample_id,
            text=task.text,
            spans=report.sample.spans,
            annotator_id=task.reviewer_id,
            source=report.sample.source,
            meta={"split_name": task.split} if task.split else {},
        )
        record = sample_to_record(stored)
        with self._lock:
            self._append({"type": "annotation", "task_id": task_id, "record": record})
        return stored

    def submit_likert(
        self, task_id: str, realism: int, fallacy_accuracy: int, span_accuracy: int
    ) -> LikertScore:
        task = self.get_task(task_id)
        if task.kind is not TaskKind.LIKERT_REVIEW:
            raise UnknownTask(f"{task_id} is not a likert_review task")
        for name, value in (
            ("realism", realism),
            ("fallacy_accuracy", fallacy_accuracy),
            ("span_accuracy", span_accuracy),
        ):
            if not isinstance(value, int) or isinstance(value, bool):
                raise OutOfScale(f"{name} must be an integer")
            if not 1 <= value <= self.likert_scale:
                raise OutOfScale(
                    f"{name}={value} outside 1..{self.likert_scale}"
                )
        with self._lock:
            self._append(
                {
                    "type": "likert",
                    "task_id": task_id,
                    "sample_id": task.sample_id,
                    "reviewer_id": task.reviewer_id,
                    "realism": realism,
                    "fallacy_accuracy": fallacy_accuracy,
                    "span_accuracy": span_accuracy,
                    "split": task.split,
                }
            )
            return self._likert[task_id]

    # -- export --

    def export_annotations(self) -> Corpus:
        with self._lock:
            records = [self._annotations[k] for k in sorted(self._annotations)]
        samples = tuple(sample_from_record(r) for r in records)
        return Corpus(samples, provenance=f"review-store:{self.path.name}")

    def likert_scores(self) -> list[LikertScore]:
        with self._lock:
            return [self._likert[k] for k in sorted(self._likert)]

    def likert_rows_csv(self) -> str:
        lines = ["split,reviewer,criterion,value"]
        for score in self.likert_scores():
            for criterion, value in score.values().items():
                lines.append(f"{score.split},{score.reviewer_id},{criterion},{value}")
        return "\n".join(lines) + "\n"

    def likert_means(self) -> dict[str, dict[str, float]]:
        """Mean per criterion per split over all stored scores."""
        buckets: dict[str, dict[str, list[int]]] = {}
        for score in self.likert_scores():
            per_split = buckets.setdefault(
                score.split, {c: [] for c in LIKERT_CRITERIA}
            )
            for criterion, value in score.values().items():
                per_split[criterion].append(value)
        return {
            split: {c: mean(vals) for c, vals in crits.items() if vals}
            for split, crits in sorted(buckets.items())
        }

    def likert_means_csv(self) -> str:
        lines = ["split,criterion,mean"]
        for split, crits in self.likert_means().items():
            for criterion, value in sorted(crits.items()):
                lines.append(f"{split},{criterion},{value:.6f}")
        return "\n".join(lines) + "\n"

    def progress(self) -> dict:
        with self._lock:
            tasks = list(self._tasks.values())
        by_kind: dict[str, dict[str, int]] = {}
        for task in tasks:
            bucket = by_kind.setdefault(task.kind.value, {"pending": 0, "done": 0})
            bucket[task.status.value] += 1
        return {
            "total": len(tasks),
            "done": sum(1 for t in tasks if t.status is TaskStatus.DONE),
            "by_kind": by_kind,
            "likert_scale": self.likert_scale,
        }


def create_app(store: ReviewStore, static_dir: Optional[Path] = None):
    """FastAPI app over a ReviewStore; optionally serves the UI bundle."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse

    app = FastAPI(title="slurg review service")
    app.state.store = store

    @app.get("/api/tasks")
    def list_tasks(reviewer: Optional[str] = None, kind: Optional[str] = None,
                   status: Optional[str] = None):
        try:
            kind_v = TaskKind(kind) if kind else None
            status_v = TaskStatus(status) if status else None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        found = store.tasks(reviewer=reviewer, kind=kind_v, status=status_v)
        return {"tasks": [t.to_payload() for t in found],
                "likert_scale": store.likert_scale}

    @app.get("/api/samples/{sample_id}")
    def get_sample(sample_id: str):
        try:
            return store.get_sample(sample_id)
        except UnknownTask:
            raise HTTPException(status_code=404, detail=f"unknown sample {sample_id}")

    @app.post("/api/annotations")
    def post_annotation(body: dict):
        task_id = body.get("task_id")
        tagged = body.get("tagged")
        if not isinstance(task_id, str) or not isinstance(tagged, str):
            raise HTTPException(status_code=400, detail="task_id and tagged required")
        try:
            stored = store.submit_annotation(task_id, tagged)
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except MalformedMarkup as exc:
            raise HTTPException(status_code=400, detail=f"malformed markup: {exc}")
        except TextDrift as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"stored": sample_to_record(stored)}

    @app.post("/api/likert")
    def post_likert(body: dict):
        task_id = body.get("task_id")
        if not isinstance(task_id, str):
            raise HTTPException(status_code=400, detail="task_id required")
        try:
            score = store.submit_likert(
                task_id,
                body.get("realism"),
                body.get("fallacy_accuracy"),
                body.get("span_accuracy"),
            )
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except OutOfScale as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"stored": score.values() | {"sample_id": score.sample_id,
                                            "reviewer_id": score.reviewer_id}}

    @app.get("/api/export")
    def export(kind: str, table: str = "rows"):
        if kind == TaskKind.SPAN_ANNOTATION.value:
            corpus = store.export_annotations()
            lines = [json.dumps(sample_to_record(s), ensure_ascii=False)
                     for s in corpus]
            body = "\n".join(lines) + ("\n" if lines else "")
            return PlainTextResponse(body, media_type="application/x-ndjson")
        if kind == TaskKind.LIKERT_REVIEW.value:
            if table == "means":
                return PlainTextResponse(store.likert_means_csv(), media_type="text/csv")
            return PlainTextResponse(store.likert_rows_csv(), media_type="text/csv")
        raise HTTPException(status_code=400, detail=f"unknown kind {kind!r}")

    @app.get("/api/progress")
    def progress():
        return store.progress()

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
