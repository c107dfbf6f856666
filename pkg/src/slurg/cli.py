"""Command line entry point wiring the modules into the full procedure.

Subcommands: ingest, filter, sample, agree, gold, split, annotate, generate,
eval, stats, review, pipeline, report. Every artifact-producing command
writes one manifest beside its output recording command line, seeds, config
checksum and paths, so runs can be reproduced and compared. Exit codes:
0 success, 1 data error, 2 config error, 3 transport failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .agreement import (
    LengthMismatch,
    NoSharedSamples,
    TextMismatch,
    pairwise_agreement,
    select_gold,
)
from .corpus_stats import (
    EmptyAfterFiltering,
    MissingPos,
    compute_stats,
    read_pos_sidecar,
)
from .dataset_ops import (
    IoFailure,
    NotEnoughSamples,
    STANDARD_SPLITS,
    SchemaViolation,
    Split,
    SplitSpec,
    filter_min_length,
    ingest,
    make_split,
    sample_annotation_batch,
)
from .llm_gateway import (
    AuditLog,
    ConfigError,
    GatewayConfig,
    TransportFailure,
    annotate_batch,
    build_generation_requests,
    generate_batch,
)
from .prompts import DEFAULT_FALLACY_DEFINITIONS, DEFAULT_GUIDELINES
from .review_service import ReviewStore, TaskKind, create_app
from .span_eval import JoinFailure, evaluate_split, reports_to_csv
from .spans import (
    Corpus,
    CorpusError,
    Source,
    read_jsonl_records,
    sample_from_record,
    write_jsonl,
)
from .tag_codec import InvalidSample, MalformedMarkup

try:
    from importlib.metadata import PackageNotFoundError, version

    VERSION = version("slurg")
except PackageNotFoundError:  # running from a checkout without install
    VERSION = "0.0.0"

DATA_ERRORS = (
    IoFailure,
    SchemaViolation,
    NotEnoughSamples,
    CorpusError,
    MalformedMarkup,
    InvalidSample,
    LengthMismatch,
    TextMismatch,
    NoSharedSamples,
    JoinFailure,
    EmptyAfterFiltering,
    MissingPos,
)


def _load_corpus(path: Path, default_source: Source = Source.SYNTHETIC) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise IoFailure(f"no such file: {path}")
    records = read_jsonl_records(path)
    samples = []
    for line_no, record in records:
        try:
            samples.append(sample_from_record(record, default_source=default_source))
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaViolation(line_no, str(exc)) from exc
    return Corpus(tuple(samples), provenance=str(path))


def _config_checksum(config_path: Optional[str]) -> str:
    if not config_path:
        return ""
    try:
        return hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc


def _write_manifest(
    beside: Path,
    args: argparse.Namespace,
    inputs: Iterable[Path],
    outputs: Iterable[Path],
) -> Path:
    target = Path(beside)
    if target.is_dir():
        manifest_path = target / "manifest.json"
    else:
        manifest_path = target.with_name(target.name + ".manifest.json")
    command = args.command
    if getattr(args, "review_command", None):
        command = f"{command} {args.review_command}"
    manifest = {
        "command": command,
        "argv": list(getattr(args, "_argv", [])),
        "config_checksum": _config_checksum(getattr(args, "config", None)),
        "seed": getattr(args, "seed", None),
        "inputs": sorted(str(p) for p in inputs),
        "outputs": sorted(str(p) for p in outputs),
        "version": VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest_path


def _prepare_out_dir(path: Path, force: bool) -> Path:
    path = Path(path)
    if path.exists() and any(path.iterdir()) and not force:
        raise ConfigError(f"output directory {path} is not empty (use --force)")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _split_dir_name(spec_name: str) -> str:
    return spec_name.replace("/", "_")


def _split_name_from_dir(dirname: str) -> str:
    return dirname.replace("_", "/")


# -- subcommand implementations --


def cmd_ingest(args: argparse.Namespace) -> int:
    result = ingest(Path(args.input), source=Source(args.source))
    out = Path(args.out)
    write_jsonl(out, result.corpus)
    rejects_path = out.with_name(out.name + ".rejects.jsonl")
    rejects_path.parent.mkdir(parents=True, exist_ok=True)
    with rejects_path.open("w", encoding="utf-8") as fh:
        for reject in result.rejects:
            fh.write(
                json.dumps(
                    {"line": reject.line, "reason": reject.reason, "raw": reject.raw},
                    ensure_ascii=False,
                )
                + "\n"
            )
    _write_manifest(out, args, [Path(args.input)], [out, rejects_path])
    print(f"ingested {len(result.corpus)} samples, {len(result.rejects)} rejects")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    filtered = filter_min_length(corpus, min_chars=args.min_chars)
    out = Path(args.out)
    write_jsonl(out, filtered)
    _write_manifest(out, args, [Path(args.input)], [out])
    print(f"kept {len(filtered)} of {len(corpus)} samples (> {args.min_chars} chars)")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    batch = sample_annotation_batch(corpus, args.n, seed=args.seed)
    out = Path(args.out)
    write_jsonl(out, batch)
    _write_manifest(out, args, [Path(args.input)], [out])
    print(f"sampled {len(batch)} of {len(corpus)} samples (seed {args.seed})")
    return 0


def cmd_agree(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    report = pairwise_agreement(corpus)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "agreement.json"
    csv_path = out_dir / "agreement.csv"
    json_path.write_text(report.to_json(), encoding="utf-8")
    csv_path.write_text(report.to_csv(), encoding="utf-8")
    _write_manifest(out_dir, args, [Path(args.input)], [json_path, csv_path])
    overall = [p.overall for p in report.pair_scores.values()]
    mean = sum(overall) / len(overall) if overall else float("nan")
    print(
        f"{len(report.annotators)} annotators, {len(report.pair_scores)} pairs, "
        f"mean pairwise IoU {mean:.4f}"
    )
    return 0


def cmd_gold(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    gold = select_gold(corpus, threshold=args.threshold, rng_seed=args.seed)
    out = Path(args.out)
    write_jsonl(out, gold)
    _write_manifest(out, args, [Path(args.input)], [out])
    print(f"selected {len(gold)} gold samples (IoU > {args.threshold})")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    spec_names = args.spec if args.spec else list(STANDARD_SPLITS)
    out_dir = Path(args.out_dir)
    outputs = []
    for name in spec_names:
        spec = SplitSpec.parse(name, seed=args.seed)
        split = make_split(corpus, spec)
        split_dir = out_dir / _split_dir_name(name)
        gold_path = split_dir / "gold.jsonl"
        few_path = split_dir / "fewshot.jsonl"
        write_jsonl(gold_path, split.gold)
        write_jsonl(few_path, split.fewshot)
        outputs += [gold_path, few_path]
        print(f"{name}: gold {len(split.gold)}, fewshot {len(split.fewshot)}")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_dir, args, [Path(args.input)], outputs)
    return 0


def _load_split(split_dir: Path, seed: int) -> Split:
    gold = _load_corpus(split_dir / "gold.jsonl")
    fewshot = _load_corpus(split_dir / "fewshot.jsonl")
    name = _split_name_from_dir(Path(split_dir).name)
    try:
        spec = SplitSpec.parse(name, seed=seed)
    except ValueError:
        total = len(gold) + len(fewshot)
        spec = SplitSpec(
            name=name,
            gold_fraction=len(gold) / total if total else 1.0,
            fewshot_fraction=len(fewshot) / total if total else 0.0,
            seed=seed,
        )
    return Split(gold=gold, fewshot=fewshot, spec=spec)


def _require_config(args: argparse.Namespace) -> GatewayConfig:
    if not getattr(args, "config", None):
        raise ConfigError("this command needs --config")
    return GatewayConfig.from_file(Path(args.config))


def cmd_annotate(args: argparse.Namespace) -> int:
    split = _load_split(Path(args.split), args.seed)
    cfg = _require_config(args)
    transport = cfg.annotation_transport.build(gold_for_echo=split.gold)
    out = Path(args.out)
    audit = AuditLog(out.with_name(out.name + ".audit.jsonl")) if args.audit else None
    result = annotate_batch(
        split,
        transport,
        guidelines=DEFAULT_GUIDELINES,
        params=cfg.annotation_params,
        audit=audit,
        parallelism=cfg.parallelism,
    )
    write_jsonl(out, result.predictions)
    outputs = [out] + ([audit.path] if audit else [])
    _write_manifest(out, args, [Path(args.split)], outputs)
    transport_failures = [f for f in result.failures if f.reason.startswith("transport")]
    for failure in result.failures:
        print(f"warning: {failure.request_id}: {failure.reason}", file=sys.stderr)
    print(
        f"annotated {len(result.predictions)} samples "
        f"({len(result.failures)} failures) -> {out}"
    )
    if transport_failures and len(transport_failures) == len(split.gold):
        raise TransportFailure("every annotation request failed at transport level")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    split = _load_split(Path(args.split), args.seed)
    cfg = _require_config(args)
    transport = cfg.generation_transport.build(gold_for_echo=split.gold)
    out = Path(args.out)
    audit = AuditLog(out.with_name(out.name + ".audit.jsonl")) if args.audit else None
    requests = build_generation_requests(
        split.fewshot,
        num_samples=args.num,
        batches=args.batches,
        seed=args.seed,
        seed_tag=f"gen-{_split_dir_name(split.spec.name)}",
    )
    result = generate_batch(
        requests,
        transport,
        definitions=DEFAULT_FALLACY_DEFINITIONS,
        params=cfg.generation_params,
        audit=audit,
        parallelism=cfg.parallelism,
        split_name=split.spec.name,
    )
    write_jsonl(out, result.corpus)
    outputs = [out] + ([audit.path] if audit else [])
    _write_manifest(out, args, [Path(args.split)], outputs)
    transport_failures = [f for f in result.failures if f.reason.startswith("transport")]
    for failure in result.failures:
        print(f"warning: {failure.request_id}: {failure.reason}", file=sys.stderr)
    print(
        f"generated {len(result.corpus)} samples from {len(requests)} batches "
        f"({len(result.failures)} failures) -> {out}"
    )
    if transport_failures and len(transport_failures) == len(requests):
        raise TransportFailure("every generation request failed at transport level")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    gold = _load_corpus(Path(args.gold))
    pred = _load_corpus(Path(args.pred))
    split_name = args.split_name or _split_name_from_dir(Path(args.gold).parent.name)
    report = evaluate_split(gold, pred, split_name=split_name)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json() + "\n", encoding="utf-8")
    _write_manifest(out, args, [Path(args.gold), Path(args.pred)], [out])
    print(
        f"{split_name}: strict F1 {report.strict.f1:.4f}, "
        f"relaxed F1 {report.relaxed.f1:.4f} "
        f"({report.n_pred_spans} pred / {report.n_gold_spans} gold spans, "
        f"{report.drift_count} drifted)"
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = _load_corpus(Path(args.input))
    pos = read_pos_sidecar(Path(args.pos_sidecar)) if args.pos_sidecar else None
    report = compute_stats(corpus, k=args.top_k, pos=pos)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "stats.json"
    hapax_path = out_dir / "hapax.csv"
    phrase_path = out_dir / "phrases.csv"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    hapax_path.write_text(report.hapax_csv(), encoding="utf-8")
    phrase_path.write_text(report.phrase_csv(), encoding="utf-8")
    inputs = [Path(args.input)] + ([Path(args.pos_sidecar)] if args.pos_sidecar else [])
    _write_manifest(out_dir, args, inputs, [json_path, hapax_path, phrase_path])
    print(
        f"{report.n_samples} samples, vocab diversity {report.vocab_diversity:.4f}, "
        f"mean hapax ratio {report.hapax.mean:.4f}"
    )
    return 0


def _open_store(args: argparse.Namespace) -> ReviewStore:
    store_dir = Path(args.store)
    store_dir.mkdir(parents=True, exist_ok=True)
    return ReviewStore(store_dir / "events.jsonl", likert_scale=args.scale)


def cmd_review_serve(args: argparse.Namespace) -> int:
    import uvicorn

    store = _open_store(args)
    static = Path(args.static) if args.static else None
    app = create_app(store, static_dir=static)
    print(f"serving review UI on http://{args.host}:{args.port} (store {args.store})")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_review_enqueue(args: argparse.Namespace) -> int:
    store = _open_store(args)
    corpus = _load_corpus(Path(args.corpus))
    reviewers = [r for r in args.reviewers.split(",") if r]
    count = store.enqueue_tasks(corpus, TaskKind(args.kind), reviewers)
    print(f"enqueued {count} {args.kind} tasks for {len(reviewers)} reviewers")
    return 0


def cmd_review_export(args: argparse.Namespace) -> int:
    store = _open_store(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == TaskKind.SPAN_ANNOTATION.value:
        write_jsonl(out, store.export_annotations())
    else:
        out.write_text(store.likert_rows_csv(), encoding="utf-8")
        means_path = out.with_name(out.stem + ".means.csv")
        means_path.write_text(store.likert_means_csv(), encoding="utf-8")
        print(f"means -> {means_path}")
    _write_manifest(out, args, [Path(args.store)], [out])
    print(f"exported {args.kind} -> {out}")
    return 0


# -- pipeline --


@dataclass
class _Stage:
    name: str

    def __enter__(self) -> "_Stage":
        print(f"[stage] {self.name} ...")
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc is not None:
            print(f"pipeline failed at stage {self.name}: {exc}", file=sys.stderr)
        return False


def cmd_pipeline(args: argparse.Namespace) -> int:
    out_dir = _prepare_out_dir(Path(args.out_dir), args.force)
    cfg = _require_config(args) if args.config else GatewayConfig()
    outputs: list[Path] = []

    with _Stage("ingest"):
        result = ingest(Path(args.input), source=Source(args.source))
        corpus_path = out_dir / "corpus.jsonl"
        write_jsonl(corpus_path, result.corpus)
        rejects_path = out_dir / "rejects.jsonl"
        with rejects_path.open("w", encoding="utf-8") as fh:
            for reject in result.rejects:
                fh.write(
                    json.dumps(
                        {"line": reject.line, "reason": reject.reason, "raw": reject.raw},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        outputs += [corpus_path, rejects_path]
        print(f"  {len(result.corpus)} samples, {len(result.rejects)} rejects")

    with _Stage("filter"):
        filtered = filter_min_length(result.corpus, min_chars=args.min_chars)
        filtered_path = out_dir / "filtered.jsonl"
        write_jsonl(filtered_path, filtered)
        outputs.append(filtered_path)
        print(f"  kept {len(filtered)} samples")

    with _Stage("agree"):
        agreement = pairwise_agreement(filtered)
        agree_dir = out_dir / "agreement"
        agree_dir.mkdir(exist_ok=True)
        (agree_dir / "agreement.json").write_text(agreement.to_json(), encoding="utf-8")
        (agree_dir / "agreement.csv").write_text(agreement.to_csv(), encoding="utf-8")
        outputs += [agree_dir / "agreement.json", agree_dir / "agreement.csv"]

    with _Stage("gold"):
        gold = select_gold(filtered, threshold=args.threshold, rng_seed=args.seed)
        gold_path = out_dir / "gold.jsonl"
        write_jsonl(gold_path, gold)
        outputs.append(gold_path)
        print(f"  {len(gold)} gold samples")

    splits: list[Split] = []
    with _Stage("split"):
        for name in STANDARD_SPLITS:
            spec = SplitSpec.parse(name, seed=args.seed)
            split = make_split(gold, spec)
            splits.append(split)
            split_dir = out_dir / "splits" / _split_dir_name(name)
            write_jsonl(split_dir / "gold.jsonl", split.gold)
            write_jsonl(split_dir / "fewshot.jsonl", split.fewshot)
            outputs += [split_dir / "gold.jsonl", split_dir / "fewshot.jsonl"]
            print(f"  {name}: gold {len(split.gold)}, fewshot {len(split.fewshot)}")

    reports = []
    preds_dir = out_dir / "preds"
    eval_dir = out_dir / "eval"
    for split in splits:
        tag = _split_dir_name(split.spec.name)
        with _Stage(f"annotate({split.spec.name})"):
            transport = cfg.annotation_transport.build(gold_for_echo=split.gold)
            audit = (
                AuditLog(preds_dir / f"{tag}.audit.jsonl") if args.audit else None
            )
            batch = annotate_batch(
                split,
                transport,
                guidelines=DEFAULT_GUIDELINES,
                params=cfg.annotation_params,
                audit=audit,
                parallelism=cfg.parallelism,
            )
            pred_path = preds_dir / f"{tag}.jsonl"
            write_jsonl(pred_path, batch.predictions)
            outputs.append(pred_path)
            transport_failures = [
                f for f in batch.failures if f.reason.startswith("transport")
            ]
            if transport_failures and len(transport_failures) == len(split.gold):
                raise TransportFailure(
                    "every annotation request failed at transport level"
                )
        with _Stage(f"eval({split.spec.name})"):
            report = evaluate_split(split.gold, batch.predictions, split.spec.name)
            reports.append(report)
            eval_dir.mkdir(exist_ok=True)
            eval_path = eval_dir / f"{tag}.json"
            eval_path.write_text(report.to_json() + "\n", encoding="utf-8")
            outputs.append(eval_path)
            print(
                f"  strict {report.strict.f1:.4f}, relaxed {report.relaxed.f1:.4f}"
            )

    synth_dir = out_dir / "synth"
    synth_all = []
    for split in splits:
        tag = _split_dir_name(split.spec.name)
        with _Stage(f"generate({split.spec.name})"):
            transport = cfg.generation_transport.build(gold_for_echo=split.gold)
            audit = (
                AuditLog(synth_dir / f"{tag}.audit.jsonl") if args.audit else None
            )
            requests = build_generation_requests(
                split.fewshot,
                num_samples=args.gen_num,
                batches=args.gen_batches,
                seed=args.seed,
                seed_tag=f"gen-{tag}",
            )
            batch = generate_batch(
                requests,
                transport,
                definitions=DEFAULT_FALLACY_DEFINITIONS,
                params=cfg.generation_params,
                audit=audit,
                parallelism=cfg.parallelism,
                split_name=split.spec.name,
            )
            synth_path = synth_dir / f"{tag}.jsonl"
            write_jsonl(synth_path, batch.corpus)
            outputs.append(synth_path)
            synth_all.extend(batch.corpus)
            print(f"  {len(batch.corpus)} synthetic samples")

    with _Stage("stats"):
        stats_dir = out_dir / "stats"
        for label, subset in (("real", gold), ("synthetic", Corpus(tuple(synth_all)))):
            report = compute_stats(subset)
            sub = stats_dir / label
            sub.mkdir(parents=True, exist_ok=True)
            (sub / "stats.json").write_text(report.to_json() + "\n", encoding="utf-8")
            (sub / "hapax.csv").write_text(report.hapax_csv(), encoding="utf-8")
            (sub / "phrases.csv").write_text(report.phrase_csv(), encoding="utf-8")
            outputs += [sub / "stats.json", sub / "hapax.csv", sub / "phrases.csv"]

    with _Stage("report"):
        payload, text = _build_report(out_dir)
        report_json = out_dir / "report.json"
        report_txt = out_dir / "report.txt"
        report_json.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        report_txt.write_text(text, encoding="utf-8")
        csv_path = eval_dir / "summary.csv"
        csv_path.write_text(reports_to_csv(reports), encoding="utf-8")
        outputs += [report_json, report_txt, csv_path]

    _write_manifest(out_dir, args, [Path(args.input)], outputs)
    print(f"pipeline complete -> {out_dir}")
    return 0


def _build_report(run_dir: Path) -> tuple[dict, str]:
    """Consolidate eval, stats and likert artifacts found under run_dir."""
    run_dir = Path(run_dir)
    f1_rows = []
    eval_dir = run_dir / "eval"
    if eval_dir.is_dir():
        found = {}
        for path in sorted(eval_dir.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            found[data.get("split", path.stem)] = data
        ordered = [n for n in STANDARD_SPLITS if n in found]
        ordered += [n for n in sorted(found) if n not in ordered]
        for name in ordered:
            data = found[name]
            f1_rows.append(
                {
                    "split": name,
                    "strict_f1": data["strict"]["f1"],
                    "relaxed_f1": data["relaxed"]["f1"],
                    "n_gold_spans": data.get("n_gold_spans"),
                    "n_pred_spans": data.get("n_pred_spans"),
                }
            )
    stats = {}
    for label in ("real", "synthetic"):
        path = run_dir / "stats" / label / "stats.json"
        if path.exists():
            data = json.loads(path.read_text(encoding="utf-8"))
            stats[label] = {
                "n_samples": data["n_samples"],
                "vocab_diversity": data["vocab_diversity"],
                "hapax_mean": data["hapax"]["mean"],
                "phrase_dist": data["phrase_dist"],
                "top_5": data["top_k"][:5],
            }
    likert = None
    store_path = run_dir / "review" / "events.jsonl"
    if store_path.exists():
        likert = ReviewStore(store_path).likert_means()

    payload = {"f1_table": f1_rows, "stats": stats, "likert_means": likert}

    lines = ["F1 by split", "split      strict   relaxed"]
    for row in f1_rows:
        lines.append(
            f"{row['split']:<10} {row['strict_f1']:<8.4f} {row['relaxed_f1']:<8.4f}"
        )
    if stats:
        lines.append("")
        lines.append("corpus statistics")
        for label, data in stats.items():
            lines.append(
                f"{label}: n={data['n_samples']} "
                f"diversity={data['vocab_diversity']:.4f} "
                f"hapax={data['hapax_mean']:.4f}"
            )
    if likert:
        lines.append("")
        lines.append("likert means")
        for split, crits in likert.items():
            crit_text = ", ".join(f"{c}={v:.2f}" for c, v in sorted(crits.items()))
            lines.append(f"{split or '(unsplit)'}: {crit_text}")
    return payload, "\n".join(lines) + "\n"


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise IoFailure(f"no such run directory: {run_dir}")
    payload, text = _build_report(run_dir)
    out = Path(args.out) if args.out else run_dir / "report.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    txt_path = out.with_suffix(".txt")
    txt_path.write_text(text, encoding="utf-8")
    _write_manifest(out, args, [run_dir], [out, txt_path])
    print(text, end="")
    return 0


# -- parser --


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="rng seed")
    common.add_argument("--config", help="gateway config JSON")

    parser = argparse.ArgumentParser(
        prog="slurg",
        description="span-level fallacy annotation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="load and validate a JSONL corpus")
    p.add_argument("input")
    p.add_argument("--source", default="reddit",
                   choices=[s.value for s in Source])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("filter", parents=[common], help="drop short samples")
    p.add_argument("input")
    p.add_argument("--min-chars", type=int, default=32)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("sample", parents=[common], help="draw an annotation batch")
    p.add_argument("input")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("agree", parents=[common], help="pairwise inter-annotator agreement")
    p.add_argument("input")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("gold", parents=[common], help="select gold annotations")
    p.add_argument("input")
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gold)

    p = sub.add_parser("split", parents=[common], help="partition gold into gold/few-shot")
    p.add_argument("input")
    p.add_argument("--spec", action="append",
                   help="split spec like 80/20 (repeatable; default: all four)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("annotate", parents=[common], help="model annotation over a split")
    p.add_argument("--split", required=True, help="split directory")
    p.add_argument("--out", required=True)
    p.add_argument("--audit", action="store_true", default=True)
    p.add_argument("--no-audit", dest="audit", action="store_false")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("generate", parents=[common], help="synthetic sample generation")
    p.add_argument("--split", required=True, help="split directory")
    p.add_argument("--num", type=int, default=5, help="samples per batch")
    p.add_argument("--batches", type=int, default=4)
    p.add_argument("--out", required=True)
    p.add_argument("--audit", action="store_true", default=True)
    p.add_argument("--no-audit", dest="audit", action="store_false")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", parents=[common], help="strict/relaxed span F1")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--split-name", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("input")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--pos-sidecar", help="TSV of sample_id, token, tag")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("review", help="review service commands")
    review_sub = p.add_subparsers(dest="review_command", required=True)

    rp = review_sub.add_parser("serve", parents=[common], help="run the review service")
    rp.add_argument("--store", required=True, help="store directory")
    rp.add_argument("--host", default="127.0.0.1")
    rp.add_argument("--port", type=int, default=8642)
    rp.add_argument("--scale", type=int, default=4, help="likert scale width")
    rp.add_argument("--static", help="UI bundle directory")
    rp.set_defaults(func=cmd_review_serve)

    rp = review_sub.add_parser("enqueue", parents=[common], help="create review tasks")
    rp.add_argument("--store", required=True)
    rp.add_argument("--corpus", required=True)
    rp.add_argument("--kind", required=True,
                    choices=[k.value for k in TaskKind])
    rp.add_argument("--reviewers", required=True, help="comma-separated ids")
    rp.add_argument("--scale", type=int, default=4)
    rp.set_defaults(func=cmd_review_enqueue)

    rp = review_sub.add_parser("export", parents=[common], help="export store contents")
    rp.add_argument("--store", required=True)
    rp.add_argument("--kind", required=True,
                    choices=[k.value for k in TaskKind])
    rp.add_argument("--out", required=True)
    rp.add_argument("--scale", type=int, default=4)
    rp.set_defaults(func=cmd_review_export)

    p = sub.add_parser("pipeline", parents=[common], help="run every stage in order")
    p.add_argument("--input", required=True, help="multi-annotator JSONL corpus")
    p.add_argument("--source", default="reddit",
                   choices=[s.value for s in Source])
    p.add_argument("--out-dir", required=True)
    p.add_argument("--min-chars", type=int, default=32)
    p.add_argument("--threshold", type=float, default=0.80)
    p.add_argument("--gen-num", type=int, default=2, help="samples per generation batch")
    p.add_argument("--gen-batches", type=int, default=2)
    p.add_argument("--audit", action="store_true",
                   help="write audit logs (timestamps break bit-reproducibility)")
    p.add_argument("--force", action="store_true", help="reuse a non-empty out dir")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("report", parents=[common], help="consolidate run artifacts")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TransportFailure as exc:
        print(f"transport failure: {exc}", file=sys.stderr)
        return 3
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
