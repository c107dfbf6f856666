"""Chat-completion transport and the annotation/generation batch pipelines.

Transports speak the OpenAI-compatible wire shape: a system plus a user
message with temperature/top_p/max_tokens. Transport-level failures are
retried with exponential backoff; malformed content is data and is never
retried. Every raw response can be persisted verbatim through an
append-only audit log so no model output is lost.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Protocol, Sequence

import requests

from .prompts import (
    ANNOTATION_PARAMS,
    GENERATION_PARAMS,
    GenerationRequest,
    PromptBundle,
    SamplingParams,
    build_annotation_prompt,
    build_generation_prompt,
)
from .spans import AnnotatedSample, Corpus, Source, Tier1
from .tag_codec import Strictness, extract_labeled_blocks, parse_tagged
from .dataset_ops import Split


class TransportFailure(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


def build_request_body(bundle: PromptBundle, model: str) -> dict:
    """The chat-completions JSON body for one prompt bundle."""
    return {
        "model": model,
        "messages": [
            {"role": "system", "content": bundle.system},
            {"role": "user", "content": bundle.user},
        ],
        "temperature": bundle.params.temperature,
        "top_p": bundle.params.top_p,
        "max_tokens": bundle.params.max_tokens,
    }


class Transport(Protocol):
    model: str

    def complete(self, bundle: PromptBundle) -> str: ...


@dataclass
class HttpTransport:
    """POSTs to {endpoint}/chat/completions with bearer auth from the
    environment variable named in auth_env."""

    endpoint: str
    model: str
    auth_env: str = ""
    timeout: float = 60.0
    max_attempts: int = 3
    backoff: float = 1.0

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ConfigError("max_attempts must be >= 1")

    def complete(self, bundle: PromptBundle) -> str:
        body = build_request_body(bundle, self.model)
        headers = {"Content-Type": "application/json"}
        if self.auth_env:
            token = os.environ.get(self.auth_env, "")
            if token:
                headers["Authorization"] = f"Bearer {token}"
        url = self.endpoint.rstrip("/") + "/chat/completions"
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                resp = requests.post(url, json=body, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = TransportFailure(f"HTTP {resp.status_code}: {resp.text[:200]}")
                continue
            if resp.status_code != 200:
                raise TransportFailure(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as exc:
                raise TransportFailure(f"malformed completion payload: {exc}") from exc
        raise TransportFailure(
            f"gave up after {self.max_attempts} attempts: {last_error}"
        )


@dataclass
class CannedTransport:
    """Returns canned responses (cycling); records every outgoing body."""

    responses: Sequence[str]
    model: str = "canned"
    requests_seen: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._cycle = itertools.cycle(self.responses)
        self._lock = threading.Lock()

    def complete(self, bundle: PromptBundle) -> str:
        body = build_request_body(bundle, self.model)
        with self._lock:
            self.requests_seen.append(body)
            return next(self._cycle)


@dataclass
class EchoGoldTransport:
    """Annotation mock: answers with the gold tags for the text in the prompt.

    Looks up the <text> block of the user prompt in the gold corpus and
    replies with that sample's rendered markup inside <labeled_text> tags.
    Closes the loop for end-to-end tests; F1 against gold is 1.0.
    """

    gold: Corpus
    model: str = "echo-gold"
    requests_seen: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        from .tag_codec import render_tagged

        self._by_text = {}
        for sample in self.gold:
            self._by_text.setdefault(sample.text, render_tagged(sample))
        self._lock = threading.Lock()

    def complete(self, bundle: PromptBundle) -> str:
        body = build_request_body(bundle, self.model)
        with self._lock:
            self.requests_seen.append(body)
        text = _extract_text_block(bundle.user)
        tagged = self._by_text.get(text)
        if tagged is None:
            return "no <labeled_text> available"
        return f"<labeled_text>\n{tagged}\n</labeled_text>"


def _extract_text_block(user_prompt: str) -> str:
    start = user_prompt.rfind("<text>")
    end = user_prompt.rfind("</text>")
    if start == -1 or end == -1:
        return ""
    return user_prompt[start + len("<text>") : end].strip("\n")


class AuditLog:
    """Append-only JSONL of every request/response pair; writes serialized."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def record(self, request_id: str, bundle: PromptBundle, raw_response: str) -> None:
        prompt_sha = hashlib.sha256(
            (bundle.system + "\x00" + bundle.user).encode("utf-8")
        ).hexdigest()
        entry = {
            "request_id": request_id,
            "prompt_sha256": prompt_sha,
            "raw_response": raw_response,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        line = json.dumps(entry, ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")


@dataclass(frozen=True)
class BatchFailure:
    request_id: str
    sample_id: str
    reason: str


@dataclass(frozen=True)
class AnnotationBatchResult:
    predictions: Corpus
    failures: tuple[BatchFailure, ...]


def annotate_batch(
    split: Split,
    transport: Transport,
    guidelines: str,
    params: SamplingParams = ANNOTATION_PARAMS,
    audit: Optional[AuditLog] = None,
    parallelism: int = 4,
) -> AnnotationBatchResult:
    """Ask the model to re-emit each gold sample with embedded tags.

    One request per gold sample, few-shot examples from the split; responses
    are parsed leniently. Every gold sample yields a prediction record; when
    the transport fails or no labeled block comes back, the prediction is
    empty (zero matches) and a failure entry is recorded. Results are merged
    in gold order regardless of the concurrency level.
    """
    if not len(split.gold):
        raise ValueError("split has no gold samples to annotate")

    def one(sample: AnnotatedSample) -> tuple[AnnotatedSample, Optional[BatchFailure]]:
        request_id = f"annotate:{split.spec.name}:{sample.sample_id}"
        bundle = build_annotation_prompt(sample.text, guidelines, split.fewshot, params)
        empty = AnnotatedSample(
            sample_id=sample.sample_id,
            text=sample.text,
            spans=frozenset(),
            annotator_id=transport.model,
            source=sample.source,
            meta={"failed": "true"},
        )
        try:
            raw = transport.complete(bundle)
        except TransportFailure as exc:
            return empty, BatchFailure(request_id, sample.sample_id, f"transport: {exc}")
        if audit:
            audit.record(request_id, bundle, raw)
        blocks = extract_labeled_blocks(raw)
        if not blocks:
            return empty, BatchFailure(request_id, sample.sample_id, "no labeled_text block")
        report = parse_tagged(
            blocks[0],
            Strictness.LENIENT,
            sample_id=sample.sample_id,
            annotator_id=transport.model,
            source=sample.source,
        )
        drift = report.sample.text != sample.text
        meta = {
            "repairs": ",".join(r.kind for r in report.repairs),
            "drift": "true" if drift else "false",
        }
        pred = AnnotatedSample(
            sample_id=sample.sample_id,
            text=report.sample.text,
            spans=report.sample.spans,
            annotator_id=transport.model,
            source=sample.source,
            meta=meta,
        )
        return pred, None

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(pool.map(one, split.gold.samples))

    predictions = tuple(pred for pred, _ in results)
    failures = tuple(fail for _, fail in results if fail is not None)
    return AnnotationBatchResult(
        predictions=Corpus(predictions, provenance=f"annotate({split.spec.name})"),
        failures=failures,
    )


ALL_FALLACY_SUBSETS: tuple[tuple[Tier1, ...], ...] = tuple(
    subset
    for size in range(4)
    for subset in itertools.combinations(
        (Tier1.CREDIBILITY, Tier1.LOGICAL, Tier1.EMOTIONAL), size
    )
)


def sample_fallacy_lists(n: int, seed: int = 0) -> list[tuple[Tier1, ...]]:
    """n draws, uniform over the 8 subsets of tier-1 labels, seeded."""
    rng = random.Random(seed)
    return [ALL_FALLACY_SUBSETS[rng.randrange(len(ALL_FALLACY_SUBSETS))] for _ in range(n)]


def build_generation_requests(
    fewshot: Corpus,
    num_samples: int,
    batches: int,
    seed: int = 0,
    seed_tag: str = "gen",
) -> list[GenerationRequest]:
    """One request per batch, each with a freshly drawn required-fallacy list."""
    lists = sample_fallacy_lists(batches, seed)
    return [
        GenerationRequest(
            fewshot=fewshot,
            num_samples=num_samples,
            fallacies=fallacies,
            seed_tag=f"{seed_tag}-{i:04d}",
        )
        for i, fallacies in enumerate(lists)
    ]


@dataclass(frozen=True)
class GenerationBatchResult:
    corpus: Corpus
    failures: tuple[BatchFailure, ...]


def generate_batch(
    requests_list: Sequence[GenerationRequest],
    transport: Transport,
    definitions: str,
    params: SamplingParams = GENERATION_PARAMS,
    audit: Optional[AuditLog] = None,
    parallelism: int = 4,
    split_name: str = "",
) -> GenerationBatchResult:
    """Run generation requests and parse each labeled block into a synthetic
    sample. Shortfalls (fewer blocks than asked) are recorded in meta, not
    treated as failures; per-request failures never abort the batch."""

    def one(item: tuple[int, GenerationRequest]) -> tuple[list[AnnotatedSample], Optional[BatchFailure]]:
        index, request = item
        tag = request.seed_tag or f"gen-{index:04d}"
        request_id = f"generate:{split_name or 'default'}:{tag}"
        bundle = build_generation_prompt(request, definitions, params)
        try:
            raw = transport.complete(bundle)
        except TransportFailure as exc:
            return [], BatchFailure(request_id, "", f"transport: {exc}")
        if audit:
            audit.record(request_id, bundle, raw)
        blocks = extract_labeled_blocks(raw)
        if not blocks:
            return [], BatchFailure(request_id, "", "no labeled_text block")
        fewshot_texts = {s.text for s in request.fewshot}
        requested = ",".join(t.value for t in request.fallacies)
        shortfall = max(0, request.num_samples - len(blocks))
        samples = []
        for j, block in enumerate(blocks):
            report = parse_tagged(
                block,
                Strictness.LENIENT,
                sample_id=f"{tag}-{j}",
                annotator_id=transport.model,
                source=Source.SYNTHETIC,
            )
            sample = report.sample
            present = {span.tier1 for span in sample.spans}
            compliant = all(t in present for t in request.fallacies)
            meta = {
                "requested_fallacies": requested,
                "split_name": split_name,
                "repairs": ",".join(r.kind for r in report.repairs),
                "compliant": "true" if compliant else "false",
                "shortfall": str(shortfall),
            }
            if sample.text in fewshot_texts:
                meta["duplicate_of_fewshot"] = "true"
            samples.append(
                AnnotatedSample(
                    sample_id=sample.sample_id,
                    text=sample.text,
                    spans=sample.spans,
                    annotator_id=transport.model,
                    source=Source.SYNTHETIC,
                    meta=meta,
                )
            )
        return samples, None

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(pool.map(one, enumerate(requests_list)))

    corpus = Corpus(
        tuple(s for samples, _ in results for s in samples),
        provenance=f"generate({split_name})" if split_name else "generate",
    )
    failures = tuple(fail for _, fail in results if fail is not None)
    return GenerationBatchResult(corpus=corpus, failures=failures)


# -- transport configuration --


@dataclass(frozen=True)
class TransportSpec:
    """One transport stanza from the config file, validated eagerly so a bad
    config fails before any request is attempted."""

    type: str = "mock_echo"
    endpoint: str = ""
    model: str = "mock"
    auth_env: str = ""
    timeout: float = 60.0
    max_attempts: int = 3
    backoff: float = 1.0
    canned_file: str = ""

    @classmethod
    def from_dict(cls, payload: dict) -> "TransportSpec":
        transport_type = payload.get("type", "mock_echo")
        if transport_type not in ("http", "mock_echo", "mock_canned"):
            raise ConfigError(f"unknown transport type {transport_type!r}")
        if transport_type == "http" and not payload.get("endpoint"):
            raise ConfigError("http transport requires an endpoint")
        if transport_type == "mock_canned" and not payload.get("canned_file"):
            raise ConfigError("mock_canned transport requires canned_file")
        return cls(
            type=transport_type,
            endpoint=payload.get("endpoint", ""),
            model=payload.get("model", "mock"),
            auth_env=payload.get("auth_env", ""),
            timeout=float(payload.get("timeout", 60.0)),
            max_attempts=int(payload.get("max_attempts", 3)),
            backoff=float(payload.get("backoff", 1.0)),
            canned_file=payload.get("canned_file", ""),
        )

    def build(self, gold_for_echo: Optional[Corpus] = None) -> Transport:
        if self.type == "http":
            return HttpTransport(
                endpoint=self.endpoint,
                model=self.model,
                auth_env=self.auth_env,
                timeout=self.timeout,
                max_attempts=self.max_attempts,
                backoff=self.backoff,
            )
        if self.type == "mock_canned":
            try:
                canned = Path(self.canned_file).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read canned_file: {exc}") from exc
            return CannedTransport(responses=[canned], model=self.model)
        if gold_for_echo is None:
            raise ConfigError("mock_echo transport needs a gold corpus")
        return EchoGoldTransport(gold=gold_for_echo, model=self.model)


@dataclass(frozen=True)
class GatewayConfig:
    """Parsed config file: a shared transport stanza, optional per-task
    overrides, sampling params per task, and the worker count."""

    annotation_transport: TransportSpec = TransportSpec()
    generation_transport: TransportSpec = TransportSpec()
    annotation_params: SamplingParams = ANNOTATION_PARAMS
    generation_params: SamplingParams = GENERATION_PARAMS
    parallelism: int = 4

    @classmethod
    def from_file(cls, path: Path) -> "GatewayConfig":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(payload)

    @classmethod
    def from_dict(cls, payload: dict) -> "GatewayConfig":
        shared = payload.get("transport", {})

        def transport(section: str) -> TransportSpec:
            return TransportSpec.from_dict(payload.get(section, shared))

        def params(section: str, defaults: SamplingParams) -> SamplingParams:
            spec = payload.get(section, {})
            try:
                return SamplingParams(
                    temperature=spec.get("temperature", defaults.temperature),
                    top_p=spec.get("top_p", defaults.top_p),
                    max_tokens=spec.get("max_tokens", defaults.max_tokens),
                )
            except ValueError as exc:
                raise ConfigError(f"bad {section} params: {exc}") from exc

        return cls(
            annotation_transport=transport("annotation_transport"),
            generation_transport=transport("generation_transport"),
            annotation_params=params("annotation", ANNOTATION_PARAMS),
            generation_params=params("generation", GENERATION_PARAMS),
            parallelism=int(payload.get("parallelism", 4)),
        )
