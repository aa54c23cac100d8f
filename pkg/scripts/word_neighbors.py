#!/usr/bin/env python3
"""Train word vectors and inspect them: nearest neighbors, and optionally
a questions-words analogy benchmark.

Without --input this trains on a synthetic corpus, where the expected
structure is that words co-occurring within a class vocabulary end up
closer than words from different classes.
"""

import argparse

import numpy as np

from lyricvec.analogy import analogy_eval, format_analogy_report, load_analogies
from lyricvec.corpus import ingest
from lyricvec.embed import Hyperparams, train_word2vec
from lyricvec.synthetic import gen_synthetic


def nearest(model, token, n):
    unit = model.in_vectors / np.linalg.norm(model.in_vectors, axis=1, keepdims=True)
    sims = unit @ unit[model.vocab.token_to_index[token]]
    order = np.argsort(-sims)
    out = []
    for i in order:
        word = model.vocab.index_to_token[i]
        if word != token:
            out.append((word, float(sims[i])))
        if len(out) == n:
            break
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--input", help="corpus JSONL; omit to generate synthetically")
    p.add_argument("--questions", help="questions-words analogy file")
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--mode", default="skipgram", choices=("skipgram", "cbow"))
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--restrict-vocab", type=int, default=0)
    p.add_argument("--probe-words", type=int, default=5,
                   help="show neighbors for the N most frequent words")
    p.add_argument("--neighbors", type=int, default=8)
    args = p.parse_args()

    if args.input:
        corpus = ingest(args.input)
    else:
        corpus = gen_synthetic(classes=4, docs_per_class=300, vocab_per_class=200,
                               overlap_fraction=0.3, seed=0)
    hyper = Hyperparams(dim=args.dim, window=args.window, epochs=args.epochs,
                        mode=args.mode, min_count=args.min_count, seed=args.seed)
    model = train_word2vec(corpus, hyper)
    print(f"trained {hyper.mode}: {len(model.vocab)} words, dim {model.dim}, "
          f"final epoch objective {model.epoch_losses[-1]:.4f}")

    for token in model.vocab.index_to_token[: args.probe_words]:
        pairs = ", ".join(f"{w} {s:.2f}" for w, s in nearest(model, token, args.neighbors))
        print(f"  {token}: {pairs}")

    if args.questions:
        report = analogy_eval(
            model, load_analogies(args.questions),
            restrict_vocab=args.restrict_vocab or None,
        )
        print()
        print(format_analogy_report(report))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
