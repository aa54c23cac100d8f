import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lyricvec.corpus import Corpus, Document

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def pytest_configure(config):
    # collected by tests/test_acceptance.py, one line per criterion
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.line(line)


def make_corpus(token_lists, labels=None, ratings=None, prefix="d"):
    """Build a corpus directly from token lists (text is the joined tokens)."""
    docs = []
    for i, tokens in enumerate(token_lists):
        docs.append(
            Document(
                id=f"{prefix}{i}",
                text=" ".join(tokens),
                tokens=list(tokens),
                label=None if labels is None else labels[i],
                rating=None if ratings is None else ratings[i],
            )
        )
    return Corpus(documents=docs)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def labeled_corpus():
    """Two classes, five docs each, distinct but overlapping vocabularies."""
    words_a = ["sun", "gold", "warm", "light", "day"]
    words_b = ["rain", "grey", "cold", "night", "storm"]
    token_lists = []
    labels = []
    gen = np.random.default_rng(7)
    for ci, words in enumerate((words_a, words_b)):
        for _ in range(5):
            token_lists.append(list(gen.choice(words + ["the", "a"], size=12)))
            labels.append(f"c{ci}")
    return make_corpus(token_lists, labels=labels)
