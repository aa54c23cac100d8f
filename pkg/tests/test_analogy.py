"""Analogy file parsing and vector-offset scoring."""

import numpy as np
import pytest

from lyricvec.analogy import (
    AnalogyReport,
    AnalogySet,
    CategoryResult,
    analogy_eval,
    analogy_eval_vectors,
    format_analogy_report,
    load_analogies,
)
from lyricvec.embed import Hyperparams, train_word2vec

from conftest import make_corpus


def one_category(questions, name="cat"):
    return AnalogySet(categories=[(name, questions)])


class TestLoadAnalogies:
    def _write(self, tmp_path, text):
        path = tmp_path / "questions.txt"
        path.write_text(text, encoding="utf-8")
        return path

    def test_parses_categories_and_lowercases(self, tmp_path):
        path = self._write(
            tmp_path,
            ": capital-common\nAthens Greece Oslo Norway\nParis France Rome Italy\n"
            "\n: family\nboy girl King Queen\n",
        )
        aset = load_analogies(path)
        assert [name for name, _ in aset.categories] == ["capital-common", "family"]
        assert aset.categories[0][1][0] == ("athens", "greece", "oslo", "norway")
        assert aset.categories[1][1] == [("boy", "girl", "king", "queen")]
        assert aset.n_questions == 3

    def test_empty_category_name_rejected(self, tmp_path):
        path = self._write(tmp_path, ":   \na b c d\n")
        with pytest.raises(ValueError, match="line 1"):
            load_analogies(path)

    def test_duplicate_category_rejected(self, tmp_path):
        path = self._write(tmp_path, ": one\na b c d\n: one\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_analogies(path)

    def test_question_before_header_rejected(self, tmp_path):
        path = self._write(tmp_path, "a b c d\n")
        with pytest.raises(ValueError, match="header"):
            load_analogies(path)

    def test_wrong_word_count_names_line(self, tmp_path):
        path = self._write(tmp_path, ": one\na b c d\na b c\n")
        with pytest.raises(ValueError, match="line 3"):
            load_analogies(path)


class TestEvalVectors:
    def test_exact_offset_is_recovered(self):
        # queen = king - man + woman by construction, banana is a distractor
        tokens = ["king", "man", "woman", "queen", "banana"]
        vectors = np.array(
            [
                [1.0, 1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
        aset = one_category([("man", "king", "woman", "queen")])
        report = analogy_eval_vectors(tokens, vectors, aset)
        assert report.correct == 1
        assert report.attempted == 1
        assert report.overall_accuracy == 100.0

    def test_question_words_excluded_from_candidates(self):
        # the target equals b exactly; with b excluded the nearest
        # remaining word wins
        tokens = ["a", "b", "c", "d", "e"]
        vectors = np.array(
            [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.6, 0.8], [1.0, 0.0]]
        )
        aset = one_category([("a", "b", "c", "d")])
        report = analogy_eval_vectors(tokens, vectors, aset)
        assert report.correct == 1

    def test_oov_questions_skipped(self):
        tokens = ["a", "b", "c", "d"]
        vectors = np.eye(4)
        aset = one_category([("a", "b", "c", "d"), ("a", "b", "c", "missing")])
        report = analogy_eval_vectors(tokens, vectors, aset)
        assert report.attempted == 1
        assert report.skipped_oov == 1

    def test_restrict_vocab_limits_questions_and_candidates(self):
        tokens = ["a", "b", "c", "d", "e"]
        vectors = np.eye(5)
        aset = one_category([("a", "b", "c", "d"), ("a", "b", "c", "e")])
        report = analogy_eval_vectors(tokens, vectors, aset, restrict_vocab=4)
        assert report.attempted == 1  # the question involving e is now OOV
        assert report.skipped_oov == 1

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(7)
        tokens = [f"w{i}" for i in range(30)]
        vectors = rng.normal(size=(30, 6))
        questions = [
            tuple(tokens[i] for i in rng.choice(30, 4, replace=False))
            for _ in range(60)
        ]
        questions.append(("w0", "w1", "w2", "nope"))
        report = analogy_eval_vectors(tokens, vectors, one_category(questions))

        unit = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
        index = {t: i for i, t in enumerate(tokens)}
        attempted = skipped = correct = 0
        for q in questions:
            if any(w not in index for w in q):
                skipped += 1
                continue
            ia, ib, ic, id_ = (index[w] for w in q)
            target = unit[ib] - unit[ia] + unit[ic]
            best, best_score = None, -np.inf
            for j in range(30):
                if j in (ia, ib, ic):
                    continue
                s = float(target @ unit[j])
                if s > best_score:
                    best, best_score = j, s
            attempted += 1
            correct += best == id_
        assert (report.attempted, report.skipped_oov, report.correct) == (
            attempted, skipped, correct,
        )

    def test_zero_vector_rows_do_not_crash(self):
        tokens = ["a", "b", "c", "d", "zero"]
        vectors = np.vstack([np.eye(4), np.zeros(4)]) * 2.0
        vectors[4] = 0.0
        report = analogy_eval_vectors(tokens, vectors, one_category([("a", "b", "c", "d")]))
        assert report.attempted == 1

    def test_input_validation(self):
        with pytest.raises(ValueError, match="empty"):
            analogy_eval_vectors([], np.zeros((0, 2)), one_category([]))
        with pytest.raises(ValueError, match="length"):
            analogy_eval_vectors(["a"], np.zeros((2, 2)), one_category([]))
        with pytest.raises(ValueError, match="restrict_vocab"):
            analogy_eval_vectors(["a"], np.zeros((1, 2)), one_category([]), restrict_vocab=0)


class TestReportArithmetic:
    def test_category_accuracy(self):
        r = CategoryResult(name="x", attempted=8, skipped_oov=2, correct=6)
        assert r.accuracy == 75.0
        assert CategoryResult(name="y", attempted=0, skipped_oov=5, correct=0).accuracy == 0.0

    def test_overall_aggregates(self):
        report = AnalogyReport(
            categories=[
                CategoryResult(name="x", attempted=10, skipped_oov=1, correct=5),
                CategoryResult(name="y", attempted=30, skipped_oov=2, correct=25),
            ]
        )
        assert report.attempted == 40
        assert report.skipped_oov == 3
        assert report.correct == 30
        assert report.overall_accuracy == 75.0
        data = report.to_dict()
        assert data["categories"][0]["accuracy"] == 50.0

    def test_format_contains_overall_with_two_decimals(self):
        report = AnalogyReport(
            categories=[CategoryResult(name="x", attempted=3, skipped_oov=0, correct=1)]
        )
        text = format_analogy_report(report)
        assert "overall" in text
        assert "33.33" in text


class TestModelEval:
    def test_wraps_model_vectors(self):
        corpus = make_corpus([["a", "b", "c", "d"] * 6] * 4)
        model = train_word2vec(
            corpus,
            Hyperparams(dim=8, window=2, negatives=2, epochs=2, mode="skipgram",
                        min_count=1, subsample_t=0.0, seed=1),
        )
        aset = one_category([("a", "b", "c", "d"), ("a", "b", "c", "zzz")])
        report = analogy_eval(model, aset)
        assert report.attempted == 1
        assert report.skipped_oov == 1
