"""Command-line interface.

Every artifact-producing subcommand takes --out RUNDIR, holds a lock on
that directory, writes its outputs atomically under fixed names
(corpus.jsonl, model.lvec, report.json, confusion.txt, manifest.json),
and records a manifest of its configuration and input hashes. Rerunning
with --resume skips work when the manifest still matches and the outputs
exist. A flat key=value --config file supplies flag defaults; explicit
flags win. LYRICVEC_THREADS caps --workers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np
from filelock import FileLock

from . import artifacts
from .analogy import analogy_eval, format_analogy_report, load_analogies
from .classify import (
    knn_classify,
    label_vector_classify,
    linear_classify,
    train_linear,
    write_predictions_jsonl,
)
from .corpus import dedup, ingest, sample_to_size, write_jsonl
from .embed import (
    DOC_MODES,
    WORD_MODES,
    Hyperparams,
    infer_doc_vector,
    train_doc2vec,
    train_word2vec,
)
from .evaluate import ConfusionMatrix, format_confusion
from .model_io import export_text, load_model, save_model
from .pipelines import CLASSIFIER_NAMES, run_genre_pipeline, run_popularity_pipeline
from .synthetic import gen_synthetic

_BOOL_CONFIG_KEYS = {"resume", "export_text"}
_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _parse_config_file(path: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}: line {line_no}: expected key=value, got {raw!r}")
        mapping[key.strip()] = value.strip()
    return mapping


def _inject_config(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags placed right after the subcommand,
    skipping any key the command line already sets."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config requires a file path")
    mapping = _parse_config_file(argv[i + 1])
    sub_idx = next((j for j, tok in enumerate(argv) if not tok.startswith("-")), None)
    if sub_idx is None:
        raise ValueError("--config requires a subcommand")
    injected: list[str] = []
    for key, value in mapping.items():
        norm = key.strip("-").replace("-", "_")
        flag = "--" + norm.replace("_", "-")
        if flag in argv:
            continue
        if norm in _BOOL_CONFIG_KEYS:
            if value.lower() in _TRUE_WORDS:
                injected.append(flag)
            elif value.lower() not in _FALSE_WORDS:
                raise ValueError(f"config key {key!r}: expected a boolean, got {value!r}")
        else:
            injected.extend([flag, value])
    return argv[: sub_idx + 1] + injected + argv[sub_idx + 1 :]


def _effective_workers(requested: int) -> int:
    cap = os.environ.get("LYRICVEC_THREADS")
    if cap:
        return max(1, min(requested, int(cap)))
    return requested


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, help="run directory for artifacts")
    p.add_argument("--resume", action="store_true",
                   help="skip the run if outputs exist and the manifest matches")
    p.add_argument("--config", help="flat key=value file supplying flag defaults")


def _add_hyper(p: argparse.ArgumentParser, modes: tuple[str, ...], default_mode: str) -> None:
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr-initial", type=float, default=0.025)
    p.add_argument("--lr-final", type=float, default=0.0001)
    p.add_argument("--subsample-t", type=float, default=1e-4,
                   help="frequent-word subsampling threshold; <= 0 disables")
    p.add_argument("--mode", choices=modes, default=default_mode)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--min-count", type=int, default=5)


def _hyper_from(args: argparse.Namespace) -> Hyperparams:
    return Hyperparams(
        dim=args.dim, window=args.window, negatives=args.negatives, epochs=args.epochs,
        lr_initial=args.lr_initial, lr_final=args.lr_final, subsample_t=args.subsample_t,
        mode=args.mode, seed=args.seed, workers=_effective_workers(args.workers),
        min_count=args.min_count,
    )


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "command", "config", "resume", "out"}
    config = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        config[key] = str(value) if isinstance(value, Path) else value
    return config


class _Run:
    """Shared start/finish steps for an artifact-producing subcommand."""

    def __init__(self, args: argparse.Namespace, command: str,
                 inputs: dict[str, str], outputs: list[str]):
        self.run_dir = Path(args.out)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.resume = args.resume
        self.manifest = artifacts.build_manifest(command, _config_dict(args), inputs, outputs)
        self.lock = FileLock(str(self.run_dir / ".lock"))

    def up_to_date(self) -> bool:
        if self.resume and artifacts.run_is_current(self.run_dir, self.manifest):
            print(f"{self.run_dir}: up to date, skipping")
            return True
        return False

    def finish(self) -> None:
        artifacts.write_manifest(self.run_dir, self.manifest)

    def path(self, name: str) -> Path:
        full = self.run_dir / name
        full.parent.mkdir(parents=True, exist_ok=True)
        return full


def _write_corpus(run: _Run, corpus) -> None:
    with artifacts.atomic_path(run.path("corpus.jsonl")) as tmp:
        write_jsonl(corpus, tmp)


def cmd_ingest(args: argparse.Namespace) -> int:
    run = _Run(args, "ingest", {"input": args.input}, ["corpus.jsonl"])
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input, format=args.format)
        _write_corpus(run, corpus)
        run.finish()
    print(f"ingested {len(corpus)} documents -> {run.path('corpus.jsonl')}")
    return 0


def cmd_dedup(args: argparse.Namespace) -> int:
    run = _Run(args, "dedup", {"input": args.input}, ["corpus.jsonl", "dedup_report.json"])
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input)
        deduped, report = dedup(corpus, threshold=args.threshold)
        _write_corpus(run, deduped)
        artifacts.atomic_write_text(run.path("dedup_report.json"), report.to_json() + "\n")
        run.finish()
    print(
        f"removed {len(report.removed_ids)} near-duplicates of {len(corpus)} documents "
        f"(threshold {args.threshold})"
    )
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    run = _Run(args, "sample", {"input": args.input}, ["corpus.jsonl"])
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input)
        sampled = sample_to_size(corpus, target_bytes=args.target_bytes, seed=args.seed)
        _write_corpus(run, sampled)
        run.finish()
    print(f"sampled {len(sampled)} of {len(corpus)} documents (>= {args.target_bytes} bytes)")
    return 0


def cmd_gen_synthetic(args: argparse.Namespace) -> int:
    run = _Run(args, "gen-synthetic", {}, ["corpus.jsonl"])
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = gen_synthetic(
            classes=args.classes, docs_per_class=args.docs_per_class,
            vocab_per_class=args.vocab_per_class, overlap_fraction=args.overlap,
            seed=args.seed, min_doc_tokens=args.min_doc_tokens,
            max_doc_tokens=args.max_doc_tokens, marker_vocab=args.marker_vocab,
            marker_rate=args.marker_rate, high_fraction=args.high_fraction,
        )
        _write_corpus(run, corpus)
        run.finish()
    print(f"generated {len(corpus)} documents in {args.classes} classes")
    return 0


def _cmd_train(args: argparse.Namespace, command: str) -> int:
    outputs = ["model.lvec"] + (["vectors.txt"] if args.export_text else [])
    run = _Run(args, command, {"input": args.input}, outputs)
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input)
        hyper = _hyper_from(args)
        if command == "train-words":
            model = train_word2vec(corpus, hyper)
        else:
            model = train_doc2vec(corpus, hyper)
        with artifacts.atomic_path(run.path("model.lvec")) as tmp:
            save_model(model, tmp)
        if args.export_text:
            with artifacts.atomic_path(run.path("vectors.txt")) as tmp:
                export_text(model, tmp)
        run.finish()
    last = model.epoch_losses[-1] if model.epoch_losses else float("nan")
    extra = f", {len(model.label_names)} labels" if model.label_names else ""
    print(
        f"trained {hyper.mode}: vocabulary {len(model.vocab)}, dim {hyper.dim}{extra}, "
        f"final epoch objective {last:.4f}"
    )
    return 0


def cmd_train_words(args: argparse.Namespace) -> int:
    return _cmd_train(args, "train-words")


def cmd_train_docs(args: argparse.Namespace) -> int:
    return _cmd_train(args, "train-docs")


def _infer_corpus_vectors(model, corpus, steps: int, seed: int) -> np.ndarray:
    vectors = np.empty((len(corpus), model.dim), dtype=np.float32)
    for i, doc in enumerate(corpus):
        vectors[i] = infer_doc_vector(model, doc.tokens, steps=steps, seed=seed + i)
    return vectors


def cmd_infer(args: argparse.Namespace) -> int:
    run = _Run(args, "infer", {"model": args.model, "input": args.input}, ["vectors.txt"])
    with run.lock:
        if run.up_to_date():
            return 0
        model = load_model(args.model)
        corpus = ingest(args.input)
        vectors = _infer_corpus_vectors(model, corpus, args.steps, args.seed)
        with artifacts.atomic_path(run.path("vectors.txt")) as tmp:
            with tmp.open("w", encoding="utf-8") as fh:
                fh.write(f"{len(corpus)} {model.dim}\n")
                for doc, vec in zip(corpus, vectors):
                    values = " ".join(repr(float(v)) for v in vec)
                    fh.write(f"{doc.id} {values}\n")
        run.finish()
    print(f"inferred {len(corpus)} document vectors -> {run.path('vectors.txt')}")
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    corpus = ingest(args.input)
    truths = {doc.id: doc.label for doc in corpus}
    evaluable = (
        model.label_names is not None
        and all(doc.label is not None for doc in corpus)
        and set(truths.values()) <= set(model.label_names)
    )
    outputs = ["predictions.jsonl"] + (["report.json", "confusion.txt"] if evaluable else [])
    run = _Run(args, "classify", {"model": args.model, "input": args.input}, outputs)
    with run.lock:
        if run.up_to_date():
            return 0
        vectors = _infer_corpus_vectors(model, corpus, args.steps, args.seed)
        if args.method == "label_vector":
            predictions = [
                label_vector_classify(model, vec, doc_id=doc.id)
                for doc, vec in zip(corpus, vectors)
            ]
        elif args.method == "knn":
            if model.doc_vectors is None:
                raise ValueError("knn needs a model with document vectors")
            k = min(args.k, model.doc_vectors.shape[0])
            predictions = [
                knn_classify(model.doc_vectors, model.doc_labels, vec, k, doc_id=doc.id)
                for doc, vec in zip(corpus, vectors)
            ]
        else:
            if model.doc_vectors is None:
                raise ValueError("softmax needs a model with document vectors")
            linear = train_linear(model.doc_vectors, model.doc_labels, seed=args.seed)
            predictions = [
                linear_classify(linear, vec, doc_id=doc.id)
                for doc, vec in zip(corpus, vectors)
            ]
        with artifacts.atomic_path(run.path("predictions.jsonl")) as tmp:
            write_predictions_jsonl(tmp, predictions, truths)
        if evaluable:
            from .evaluate import confusion as _confusion, f1_scores as _f1

            cm = _confusion(
                [doc.label for doc in corpus],
                [p.predicted_label for p in predictions],
                model.label_names,
            )
            report = _f1(cm, metadata={"classifier": args.method, "seed": args.seed})
            artifacts.atomic_write_json(run.path("report.json"), report.to_dict())
            artifacts.atomic_write_text(run.path("confusion.txt"), format_confusion(cm) + "\n")
            print(f"average F1 {report.average_f1:.4f} over {len(corpus)} documents")
        else:
            print(f"classified {len(corpus)} documents (no evaluation: unlabeled input)")
        run.finish()
    return 0


def _stderr_log(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _classifier_list(raw: str) -> tuple[str, ...]:
    names = tuple(name.strip() for name in raw.split(",") if name.strip())
    for name in names:
        if name not in CLASSIFIER_NAMES:
            raise ValueError(f"unknown classifier {name!r} (choose from {CLASSIFIER_NAMES})")
    if not names:
        raise ValueError("no classifiers selected")
    return names


def _summed_confusion(reports) -> ConfusionMatrix:
    classes = reports[0].confusion.classes
    total = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for report in reports:
        total += report.confusion.counts
    return ConfusionMatrix(classes=classes, counts=total)


def cmd_genre_pipeline(args: argparse.Namespace) -> int:
    classifiers = _classifier_list(args.models)
    prediction_files = [
        f"predictions/v{v}_{name}.jsonl"
        for v in range(args.versions) for name in classifiers
    ]
    outputs = ["report.json", "confusion.txt"] + prediction_files
    run = _Run(args, "genre-pipeline", {"input": args.input}, outputs)
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input)
        result = run_genre_pipeline(
            corpus, versions=args.versions, hyper=_hyper_from(args),
            per_class=args.per_class if args.per_class > 0 else None,
            train_fraction=args.train_fraction, classifiers=classifiers,
            knn_k=args.k, infer_steps=args.infer_steps, log=_stderr_log,
        )
        artifacts.atomic_write_json(run.path("report.json"), result.to_dict())
        sections = []
        for name in classifiers:
            summed = _summed_confusion([v.reports[name] for v in result.versions])
            sections.append(f"# {name} (all versions summed)\n{format_confusion(summed)}")
        artifacts.atomic_write_text(run.path("confusion.txt"), "\n\n".join(sections) + "\n")
        truths = {doc.id: doc.label for doc in corpus}
        for v in result.versions:
            for name, preds in v.predictions.items():
                with artifacts.atomic_path(
                    run.path(f"predictions/v{v.version}_{name}.jsonl")
                ) as tmp:
                    write_predictions_jsonl(tmp, preds, truths)
        run.finish()
    for name, agg in sorted(result.aggregate.items()):
        print(
            f"{name}: mean F1 {agg.mean_average_f1:.4f} "
            f"(std {agg.std_average_f1:.4f}, range {agg.min_average_f1:.4f}"
            f"-{agg.max_average_f1:.4f}) over {agg.versions} versions"
        )
    return 0


def cmd_popularity_pipeline(args: argparse.Namespace) -> int:
    classifiers = _classifier_list(args.models)
    run = _Run(args, "popularity-pipeline", {"input": args.input},
               ["report.json", "confusion.txt"])
    with run.lock:
        if run.up_to_date():
            return 0
        corpus = ingest(args.input)
        result = run_popularity_pipeline(
            corpus, versions=args.versions, hyper=_hyper_from(args),
            train_fraction=args.train_fraction, classifiers=classifiers,
            knn_k=args.k, infer_steps=args.infer_steps, log=_stderr_log,
        )
        artifacts.atomic_write_json(run.path("report.json"), result.to_dict())
        sections = []
        for genre, pipeline in sorted(result.per_genre.items()):
            for name in classifiers:
                summed = _summed_confusion([v.reports[name] for v in pipeline.versions])
                sections.append(f"# {genre} / {name}\n{format_confusion(summed)}")
        artifacts.atomic_write_text(run.path("confusion.txt"), "\n\n".join(sections) + "\n")
        run.finish()
    for genre, pipeline in sorted(result.per_genre.items()):
        summary = "  ".join(
            f"{name}={agg.mean_average_f1:.4f}"
            for name, agg in sorted(pipeline.aggregate.items())
        )
        print(f"{genre}: {summary}")
    for genre, reason in sorted(result.skipped.items()):
        print(f"{genre}: skipped ({reason})")
    return 0


def cmd_analogy(args: argparse.Namespace) -> int:
    run = _Run(args, "analogy", {"model": args.model, "questions": args.questions},
               ["report.json", "report.txt"])
    with run.lock:
        if run.up_to_date():
            return 0
        model = load_model(args.model)
        questions = load_analogies(args.questions)
        report = analogy_eval(
            model, questions,
            restrict_vocab=args.restrict_vocab if args.restrict_vocab > 0 else None,
        )
        artifacts.atomic_write_json(run.path("report.json"), report.to_dict())
        artifacts.atomic_write_text(run.path("report.txt"), format_analogy_report(report) + "\n")
        run.finish()
    print(
        f"overall accuracy {report.overall_accuracy:.2f} "
        f"({report.correct}/{report.attempted} attempted, {report.skipped_oov} skipped)"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        raise ValueError(f"no report.json under {run_dir}")
    print(json.dumps(json.loads(report_path.read_text(encoding="utf-8")),
                     indent=2, sort_keys=True))
    confusion_path = run_dir / "confusion.txt"
    if confusion_path.exists():
        print()
        print(confusion_path.read_text(encoding="utf-8"), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyricvec",
        description="Train and evaluate document, label, and word embeddings.",
    )
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("ingest", help="normalize a raw corpus into canonical JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("dedup", help="remove near-duplicate documents")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=0.8)
    _add_common(p)
    p.set_defaults(func=cmd_dedup)

    p = sub.add_parser("sample", help="random subset reaching a byte budget")
    p.add_argument("--input", required=True)
    p.add_argument("--target-bytes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("gen-synthetic", help="generate a labeled synthetic corpus")
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--docs-per-class", type=int, default=1250)
    p.add_argument("--vocab-per-class", type=int, default=400)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-doc-tokens", type=int, default=50)
    p.add_argument("--max-doc-tokens", type=int, default=300)
    p.add_argument("--marker-vocab", type=int, default=20)
    p.add_argument("--marker-rate", type=float, default=0.2)
    p.add_argument("--high-fraction", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("train-words", help="train word vectors")
    p.add_argument("--input", required=True)
    p.add_argument("--export-text", action="store_true",
                   help="also write vectors.txt in the classic text format")
    _add_hyper(p, WORD_MODES, "skipgram")
    _add_common(p)
    p.set_defaults(func=cmd_train_words)

    p = sub.add_parser("train-docs", help="train document, label, and word vectors")
    p.add_argument("--input", required=True)
    p.add_argument("--export-text", action="store_true")
    _add_hyper(p, DOC_MODES, "pvdm")
    _add_common(p)
    p.set_defaults(func=cmd_train_docs)

    p = sub.add_parser("infer", help="infer vectors for documents under a frozen model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("classify", help="predict labels for documents")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=CLASSIFIER_NAMES, default="label_vector")
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("genre-pipeline",
                       help="multi-version genre experiment with aggregate report")
    p.add_argument("--input", required=True)
    p.add_argument("--versions", type=int, default=10)
    p.add_argument("--per-class", type=int, default=1000,
                   help="undersample each class to this many documents; 0 disables")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--models", default=",".join(CLASSIFIER_NAMES),
                   help="comma-separated classifiers to run")
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--infer-steps", type=int, default=50)
    _add_hyper(p, DOC_MODES, "pvdm")
    _add_common(p)
    p.set_defaults(func=cmd_genre_pipeline)

    p = sub.add_parser("popularity-pipeline",
                       help="per-genre binary popularity experiment")
    p.add_argument("--input", required=True)
    p.add_argument("--versions", type=int, default=10)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--models", default=",".join(CLASSIFIER_NAMES))
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--infer-steps", type=int, default=50)
    _add_hyper(p, DOC_MODES, "pvdm")
    _add_common(p)
    p.set_defaults(func=cmd_popularity_pipeline)

    p = sub.add_parser("analogy", help="run the word-analogy benchmark")
    p.add_argument("--model", required=True)
    p.add_argument("--questions", required=True)
    p.add_argument("--restrict-vocab", type=int, default=0,
                   help="consider only the N most frequent words; 0 means all")
    _add_common(p)
    p.set_defaults(func=cmd_analogy)

    p = sub.add_parser("report", help="print a run directory's stored report")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args) or 0
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
