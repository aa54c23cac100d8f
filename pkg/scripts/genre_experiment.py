#!/usr/bin/env python3
"""Multi-version genre classification experiment on a synthetic corpus.

Generates a labeled corpus, runs the full pipeline (undersample, split,
train doc/label vectors, infer test vectors, classify, evaluate) over
several seeded dataset versions, and prints aggregate macro-F1 per
classifier plus any asymmetric confusion pairs in the summed matrix.

Example:
    python3 scripts/genre_experiment.py --classes 8 --docs-per-class 1250 \
        --versions 10 --dim 100 --epochs 12 --mode pvdbow
"""

import argparse
import json
import sys
import time

import numpy as np

from lyricvec.corpus import ingest
from lyricvec.embed import Hyperparams
from lyricvec.evaluate import ConfusionMatrix, asymmetry_report, format_confusion
from lyricvec.pipelines import run_genre_pipeline
from lyricvec.synthetic import gen_synthetic


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--input", help="corpus JSONL; omit to generate synthetically")
    p.add_argument("--classes", type=int, default=8)
    p.add_argument("--docs-per-class", type=int, default=1250)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--corpus-seed", type=int, default=0)
    p.add_argument("--versions", type=int, default=10)
    p.add_argument("--per-class", type=int, default=1000)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--mode", default="pvdbow", choices=("pvdm", "pvdbow"))
    p.add_argument("--infer-steps", type=int, default=25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--report", help="also write the full result as JSON here")
    return p.parse_args()


def main():
    args = parse_args()
    if args.input:
        corpus = ingest(args.input)
    else:
        corpus = gen_synthetic(
            classes=args.classes, docs_per_class=args.docs_per_class,
            overlap_fraction=args.overlap, seed=args.corpus_seed,
        )
    print(f"corpus: {len(corpus)} documents, {len(corpus.label_set)} classes")
    hyper = Hyperparams(dim=args.dim, epochs=args.epochs, mode=args.mode, seed=args.seed)
    start = time.time()
    result = run_genre_pipeline(
        corpus, versions=args.versions, hyper=hyper, per_class=args.per_class,
        infer_steps=args.infer_steps, log=lambda m: print(m, file=sys.stderr),
    )
    print(f"\n{args.versions} versions in {time.time() - start:.1f}s")
    print(f"{'classifier':>14}  {'mean F1':>8}  {'std':>6}  {'min':>6}  {'max':>6}")
    for name, agg in sorted(result.aggregate.items()):
        print(f"{name:>14}  {agg.mean_average_f1:8.4f}  {agg.std_average_f1:6.4f}"
              f"  {agg.min_average_f1:6.4f}  {agg.max_average_f1:6.4f}")

    # which genre pairs get confused in one direction but not back?
    for name in sorted(result.aggregate):
        reports = [v.reports[name] for v in result.versions]
        summed = ConfusionMatrix(
            classes=reports[0].confusion.classes,
            counts=np.sum([r.confusion.counts for r in reports], axis=0),
        )
        flags = asymmetry_report(summed).flags
        if flags:
            print(f"\nasymmetric confusions ({name}):")
            for a, b in flags:
                print(f"  {a} -> {b} but not {b} -> {a}")
            print(format_confusion(summed))

    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
        print(f"\nwrote {args.report}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
