import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosgns.embeddings import EmbeddingSet
from rosgns.errors import FormatError, UndefinedCorrelationError
from rosgns.evaluation import (
    EvalReport,
    SimilarityDataset,
    evaluate,
    evaluate_or_na,
    format_table,
    load_dataset,
    reports_to_csv,
    spearman,
)

from oracles import reference_spearman


def angle_embeddings(angles):
    """Unit 2-D vectors; word0 sits at angle 0 and word{i+1} at angles[i]."""
    rows = [[1.0, 0.0]] + [[math.cos(a), math.sin(a)] for a in angles]
    return EmbeddingSet(tuple(f"w{i}" for i in range(len(rows))), rows)


class TestLoadDataset:
    def test_single_pair(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("cat dog 7.0\n")
        ds = load_dataset(path)
        assert ds.pairs == (("cat", "dog", 7.0),)
        assert ds.name == "d"

    def test_header_and_commas(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("Word1,Word2,Score\nTiger,Cat,7.35\nbook,paper,7.46\n")
        ds = load_dataset(path, "ws")
        assert ds.name == "ws" and len(ds) == 2
        assert ds.pairs[0] == ("tiger", "cat", 7.35)

    def test_tabs(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("a\tb\t1\nc\td\t2.5\n")
        assert [p[2] for p in load_dataset(path).pairs] == [1.0, 2.5]

    def test_bad_line_number(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("a b 1\nc d e\n")
        with pytest.raises(FormatError, match="line 2"):
            load_dataset(path)

    def test_non_finite_score(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("a b 1\nc d nan\n")
        with pytest.raises(FormatError, match="line 2"):
            load_dataset(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("")
        with pytest.raises(FormatError):
            load_dataset(path)

    def test_duplicates_dropped(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("a b 1\nB A 3\nc d 2\n")
        assert load_dataset(path).pairs == (("a", "b", 1.0), ("c", "d", 2.0))

    def test_bundled_toy_file(self, toy_similarity_file):
        ds = load_dataset(toy_similarity_file)
        assert len(ds) == 302
        assert all(math.isfinite(s) for _, _, s in ds.pairs)


class TestSpearman:
    def test_identical(self):
        assert spearman([1, 2, 3], [1, 2, 3]) == 1.0

    def test_reversed(self):
        assert spearman([1, 2, 3], [3, 2, 1]) == -1.0

    def test_tied_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            xs = rng.integers(0, 6, size=20).astype(float)
            ys = rng.integers(0, 6, size=20).astype(float)
            if len(set(xs)) > 1 and len(set(ys)) > 1:
                assert abs(spearman(xs, ys) - reference_spearman(xs, ys)) <= 1e-12

    def test_too_short(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([1.0], [2.0])

    def test_constant(self):
        with pytest.raises(UndefinedCorrelationError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=3, max_size=25))
    def test_monotone_transform_invariance(self, pairs):
        xs = np.array([p[0] for p in pairs], dtype=float)
        ys = np.array([p[1] for p in pairs], dtype=float)
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            return
        base = spearman(xs, ys)
        assert spearman(np.exp(xs / 10), ys) == pytest.approx(base, abs=1e-12)
        assert spearman(xs, 3 * ys ** 3 + 1) == pytest.approx(base, abs=1e-12)


class TestEvaluate:
    def test_perfect_ordering(self):
        emb = angle_embeddings([0.1, 0.5, 1.0, 1.4])
        ds = SimilarityDataset("t", tuple((f"w0", f"w{i}", 10.0 - i) for i in range(1, 5)))
        report = evaluate(emb, ds)
        assert report.spearman == 1.0 and report.pairs_used == 4 == report.pairs_total

    def test_oov_pairs_skipped(self):
        emb = angle_embeddings([0.1, 0.5, 1.0])
        ds = SimilarityDataset("t", (("w0", "w1", 3.0), ("w0", "zz", 9.0), ("w0", "w2", 2.0), ("w0", "w3", 1.0)))
        report = evaluate(emb, ds)
        assert (report.pairs_used, report.pairs_total) == (3, 4)
        assert report.spearman == 1.0

    def test_all_oov(self):
        emb = angle_embeddings([0.1])
        ds = SimilarityDataset("t", (("x", "y", 1.0), ("u", "v", 2.0)))
        with pytest.raises(UndefinedCorrelationError) as info:
            evaluate(emb, ds)
        assert info.value.pairs_used == 0 and info.value.pairs_total == 2
        report = evaluate_or_na(emb, ds)
        assert report.spearman is None and report.cell() == "n/a (0/2 pairs)"

    def test_row_order_and_scale_invariance(self):
        rng = np.random.default_rng(1)
        vectors = rng.normal(size=(15, 4))
        tokens = tuple(f"w{i}" for i in range(15))
        pairs = [(f"w{i}", f"w{j}", float(rng.uniform(0, 10))) for i, j in rng.integers(0, 15, size=(30, 2))
                 if i != j]
        ds = SimilarityDataset("t", tuple(dict(((frozenset(p[:2]), p) for p in pairs)).values()))
        base = evaluate(EmbeddingSet(tokens, vectors), ds).spearman
        shuffled = SimilarityDataset("t", tuple(ds.pairs[i] for i in rng.permutation(len(ds))))
        assert evaluate(EmbeddingSet(tokens, vectors), shuffled).spearman == pytest.approx(base, abs=1e-15)
        assert evaluate(EmbeddingSet(tokens, 7.5 * vectors), ds).spearman == base


class TestReporting:
    def test_table(self):
        rows = {"ro-sgns": [EvalReport("ws", 0.5, 3, 4), EvalReport("men", None, 1, 9)],
                "svd": [EvalReport("ws", 0.25, 3, 4)]}
        lines = format_table(rows).splitlines()
        assert lines[0].split() == ["method", "ws", "men"]
        assert "0.500" in lines[2] and "n/a (1/9 pairs)" in lines[2]
        assert lines[3].split() == ["svd", "0.250"]

    def test_csv(self):
        rows = {"a": [EvalReport("ws", 0.125, 3, 4), EvalReport("men", None, 0, 2)]}
        records = list(csv.DictReader(io.StringIO(reports_to_csv(rows))))
        assert records[0] == {"method": "a", "dataset": "ws", "spearman": "0.125", "pairs_used": "3",
                              "pairs_total": "4"}
        assert records[1]["spearman"] == ""
