import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosgns.embeddings import (
    EmbeddingSet,
    cosine_similarity,
    extract_embeddings,
    load_embeddings,
    nearest_neighbors,
    save_embeddings,
)
from rosgns.errors import ContractError, FormatError, TokenNotFoundError
from rosgns.manifold import LowRankFactors, from_product


def random_factors(rng, n, m, d):
    U, _ = np.linalg.qr(rng.normal(size=(n, d)))
    V, _ = np.linalg.qr(rng.normal(size=(m, d)))
    return LowRankFactors(U, rng.normal(size=(d, d)), V)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def brute_neighbors(vectors, qi):
    """Full sort of (-cos, index) tuples, computed row by row."""
    q = vectors[qi]
    rows = []
    for i, v in enumerate(vectors):
        if i != qi:
            rows.append((-float(q @ v / (np.linalg.norm(q) * np.linalg.norm(v))), i))
    return sorted(rows)


class TestExtract:
    def test_diagonal(self):
        f = LowRankFactors(np.eye(2), np.diag([4.0, 1.0]), np.eye(2))
        W, C = extract_embeddings(f)
        np.testing.assert_allclose(np.abs(W), np.diag([2.0, 1.0]), atol=1e-15)
        np.testing.assert_allclose(np.abs(C), np.diag([2.0, 1.0]), atol=1e-15)

    def test_known_svd_is_recovered(self):
        rng = np.random.default_rng(0)
        U0, _ = np.linalg.qr(rng.normal(size=(9, 3)))
        V0, _ = np.linalg.qr(rng.normal(size=(7, 3)))
        s0 = np.array([5.0, 2.0, 0.5])
        W, _ = extract_embeddings(from_product(U0, V0 * s0))
        expected = U0 * np.sqrt(s0)
        # columns agree up to sign
        for j in range(3):
            col = expected[:, j]
            assert min(np.linalg.norm(W[:, j] - col), np.linalg.norm(W[:, j] + col)) <= 1e-10

    @pytest.mark.parametrize("scaling", ["sqrt", "full", "none"])
    def test_product_preserved(self, scaling):
        rng = np.random.default_rng(1)
        f = random_factors(rng, 12, 10, 5)
        W, C = extract_embeddings(f, scaling)
        assert rel(W @ C.T, f.to_dense()) <= 1e-8

    def test_full_scaling_preserves_gram(self):
        rng = np.random.default_rng(2)
        f = random_factors(rng, 15, 11, 5)
        X = f.to_dense()
        W, _ = extract_embeddings(f, "full")
        assert rel(W @ W.T, X @ X.T) <= 1e-8

    def test_sqrt_scaling_values_descend(self):
        f = random_factors(np.random.default_rng(3), 8, 8, 4)
        W, C = extract_embeddings(f)
        norms = np.linalg.norm(W, axis=0)
        assert np.all(np.diff(norms) <= 1e-12)
        np.testing.assert_allclose(norms, np.linalg.norm(C, axis=0), rtol=1e-12)

    def test_sign_convention(self):
        f = random_factors(np.random.default_rng(4), 10, 6, 3)
        W, _ = extract_embeddings(f, "none")
        pivots = W[np.argmax(np.abs(W), axis=0), np.arange(3)]
        assert np.all(pivots >= 0)

    def test_sign_is_independent_of_input_signs(self):
        f = random_factors(np.random.default_rng(5), 10, 6, 3)
        flipped = LowRankFactors(-f.U, f.S, -f.V)
        np.testing.assert_allclose(extract_embeddings(f)[0], extract_embeddings(flipped)[0], atol=1e-12)

    def test_zero_singular_value_gives_zero_column(self):
        f = LowRankFactors(np.eye(3)[:, :2], np.diag([2.0, 0.0]), np.eye(3)[:, :2])
        W, _ = extract_embeddings(f)
        np.testing.assert_array_equal(W[:, 1], 0.0)

    def test_unknown_scaling(self):
        with pytest.raises(ContractError):
            extract_embeddings(random_factors(np.random.default_rng(0), 3, 3, 1), "cube")


class TestCosine:
    def test_self(self):
        assert cosine_similarity([3.0, -1.0], [3.0, -1.0]) == pytest.approx(1.0, abs=1e-15)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        assert cosine_similarity([1.0, 2.0], [3.0, 4.0]) == pytest.approx(11 / (math.sqrt(5) * 5), rel=1e-15)

    def test_zero_vector(self):
        assert cosine_similarity([0.0, 0.0], [1.0, 2.0]) == 0.0

    @given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
           st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
    def test_bounded(self, a, b):
        assert -1.0 <= cosine_similarity(a, b) <= 1.0


class TestEmbeddingSet:
    def test_immutable(self):
        emb = EmbeddingSet(("a",), [[1.0, 2.0]])
        with pytest.raises(ValueError):
            emb.vectors[0, 0] = 5.0

    def test_row_count_must_match(self):
        with pytest.raises(ContractError):
            EmbeddingSet(("a", "b"), [[1.0]])

    def test_non_finite_rejected(self):
        with pytest.raises(ContractError):
            EmbeddingSet(("a",), [[np.nan]])

    def test_missing_token_suggests(self):
        emb = EmbeddingSet(("house", "mouse", "tree"), np.eye(3))
        with pytest.raises(TokenNotFoundError) as info:
            emb.vector("hous")
        assert "house" in info.value.suggestions


class TestNeighbors:
    def test_duplicates_first(self):
        emb = EmbeddingSet(("word0", "word1", "word2"), [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert nearest_neighbors(emb, "word0", 2) == [("word1", 1.0), ("word2", 0.0)]

    def test_offset_past_end(self):
        emb = EmbeddingSet(("a", "b", "c"), np.eye(3))
        assert nearest_neighbors(emb, "a", 5, offset=2) == []

    def test_ties_by_index(self):
        emb = EmbeddingSet(tuple("abcd"), [[1.0, 0.0], [0.0, 1.0], [0.0, 2.0], [0.0, 1.0]])
        assert [t for t, _ in nearest_neighbors(emb, "a", 3)] == ["b", "c", "d"]

    def test_matches_brute_force_sort(self):
        rng = np.random.default_rng(6)
        vectors = rng.normal(size=(50, 8))
        emb = EmbeddingSet(tuple(f"t{i}" for i in range(50)), vectors)
        for qi in (0, 17, 49):
            expected = brute_neighbors(vectors, qi)
            got = nearest_neighbors(emb, f"t{qi}", 49)
            assert [t for t, _ in got] == [f"t{i}" for _, i in expected]
            np.testing.assert_allclose([c for _, c in got], [-c for c, _ in expected], atol=1e-12)

    def test_offset_window(self):
        rng = np.random.default_rng(7)
        emb = EmbeddingSet(tuple(f"t{i}" for i in range(30)), rng.normal(size=(30, 4)))
        full = nearest_neighbors(emb, "t3", 29)
        assert nearest_neighbors(emb, "t3", 10, offset=10) == full[10:20]

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_permutation_equivariant(self, seed):
        rng = np.random.default_rng(seed)
        # integer-valued vectors avoid near-ties decided by round-off
        vectors = rng.integers(-5, 6, size=(12, 3)).astype(float) + rng.normal(size=(12, 3))
        tokens = tuple(f"t{i}" for i in range(12))
        perm = rng.permutation(12)
        a = EmbeddingSet(tokens, vectors)
        b = EmbeddingSet(tuple(tokens[i] for i in perm), vectors[perm])
        ra, rb = nearest_neighbors(a, "t0", 11), nearest_neighbors(b, "t0", 11)
        assert dict(ra) == pytest.approx(dict(rb), abs=1e-12)
        assert {t for t, _ in ra} == {t for t, _ in rb}

    def test_oov(self):
        emb = EmbeddingSet(("a", "b"), np.eye(2))
        with pytest.raises(TokenNotFoundError):
            nearest_neighbors(emb, "zz")

    def test_bad_count(self):
        emb = EmbeddingSet(("a", "b"), np.eye(2))
        with pytest.raises(ContractError):
            nearest_neighbors(emb, "a", 0)


class TestFile:
    def test_round_trip_preserves_cosines(self, tmp_path):
        rng = np.random.default_rng(8)
        emb = EmbeddingSet(tuple(f"t{i}" for i in range(20)), rng.normal(size=(20, 6)))
        path = tmp_path / "e.txt"
        save_embeddings(emb, path)
        back = load_embeddings(path)
        assert back.tokens == emb.tokens
        for i in range(20):
            for j in range(20):
                a = cosine_similarity(emb.vectors[i], emb.vectors[j])
                b = cosine_similarity(back.vectors[i], back.vectors[j])
                assert abs(a - b) <= 1e-8

    def test_exact_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        emb = EmbeddingSet(("x", "y"), rng.normal(size=(2, 3)))
        path = tmp_path / "e.txt"
        save_embeddings(emb, path)
        np.testing.assert_array_equal(load_embeddings(path).vectors, emb.vectors)
        assert path.read_text().splitlines()[0] == "2 3"

    def test_empty(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("0 5\n")
        assert len(load_embeddings(path)) == 0

    def test_short_row_names_line(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("2 5\na 1 2 3 4 5\nb 1 2 3 4\n")
        with pytest.raises(FormatError, match="line 3") as info:
            load_embeddings(path)
        assert "'b'" in str(info.value)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("five\n")
        with pytest.raises(FormatError, match="line 1"):
            load_embeddings(path)

    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "e.txt"
        path.write_text("3 1\na 1\n")
        with pytest.raises(FormatError):
            load_embeddings(path)
