import numpy as np
import pytest
import scipy.sparse as sp

from rosgns.corpus import CooccurrenceStats, Vocabulary, build_vocabulary, count_cooccurrences, read_tokens
from rosgns.data import toy_corpus_path, toy_similarity_path


def make_stats(counts, window=5):
    """Stats straight from a dense square count matrix (tokens w0, w1, ...)."""
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.shape[0]
    vocab = Vocabulary(tuple(f"w{i}" for i in range(n)), np.arange(n, 0, -1) + 1, 0)
    return CooccurrenceStats(vocab, sp.csr_matrix(counts), window)


def random_stats(rng, n, density=0.6, high=20):
    counts = rng.integers(1, high, size=(n, n)) * (rng.random((n, n)) < density)
    counts[0, 0] = max(counts[0, 0], 1)
    return make_stats(counts)


@pytest.fixture(scope="session")
def toy_tokens():
    return read_tokens(str(toy_corpus_path()))


@pytest.fixture(scope="session")
def toy_stats(toy_tokens):
    vocab = build_vocabulary(toy_tokens, 20)
    return count_cooccurrences(toy_tokens, vocab, 5)


@pytest.fixture(scope="session")
def toy_similarity_file():
    return str(toy_similarity_path())


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE:
        terminalreporter.write_line(line)
