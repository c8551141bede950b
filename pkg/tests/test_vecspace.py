import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scriptorium.errors import EmptySpace, KeyMissing, NoVector, ParseError
from scriptorium.vecspace import (
    VectorSpace,
    knn,
    mean_vector,
    read_vector_file,
    term_vector,
    union_knn,
    write_vector_file,
)

from conftest import make_label


def brute_force_knn(entries: dict, query, k: int, exclude=frozenset()):
    """Independent oracle: plain python full scan and sort."""
    scored = []
    for key, vec in entries.items():
        if key in exclude:
            continue
        scored.append((math.dist(vec, query), key))
    scored.sort()
    return scored[:k]


class TestKnn:
    def test_nearest_of_two(self):
        space = VectorSpace("s", 2, {"a": (0, 0), "b": (3, 4)})
        out = knn(space, np.array([0.0, 0.0]), 1)
        assert out[0].key == "a" and out[0].distance == 0.0

    def test_k_clamped(self):
        space = VectorSpace("s", 2, {"a": (0, 0), "b": (1, 0), "c": (2, 0)})
        out = knn(space, np.array([0.0, 0.0]), 10)
        assert [r.key for r in out] == ["a", "b", "c"]

    def test_tie_breaks_lexicographically(self):
        space = VectorSpace("s", 2, {"zz": (1, 0), "aa": (0, 1)})
        out = knn(space, np.array([0.0, 0.0]), 2)
        assert [r.key for r in out] == ["aa", "zz"]

    def test_empty_space(self):
        with pytest.raises(EmptySpace):
            knn(VectorSpace("s", 2), np.zeros(2), 1)

    def test_exclude(self):
        space = VectorSpace("s", 2, {"a": (0, 0), "b": (1, 0)})
        out = knn(space, np.zeros(2), 1, exclude={"a"})
        assert out[0].key == "b"

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_matches_brute_force(self, data):
        n = data.draw(st.integers(2, 40))
        dim = data.draw(st.sampled_from([2, 4, 8]))
        seed = data.draw(st.integers(0, 2**31))
        rng = np.random.default_rng(seed)
        entries = {f"k{i:03d}": rng.normal(size=dim) for i in range(n)}
        space = VectorSpace("s", dim, entries)
        query = rng.normal(size=dim)
        k = data.draw(st.integers(1, n))
        got = knn(space, query, k)
        want = brute_force_knn({k_: tuple(v) for k_, v in entries.items()}, tuple(query), k)
        assert [r.key for r in got] == [key for _, key in want]
        for r, (d, _) in zip(got, want):
            assert r.distance == pytest.approx(d, abs=1e-12)


class TestUnionKnn:
    def test_identical_spaces_equal_single_knn(self):
        entries = {"a": (0, 0), "b": (1, 0), "c": (0, 2)}
        space = VectorSpace("s", 2, entries)
        plain = knn(space, space["a"], 2)
        union = union_knn(space, space, "a", 2)
        assert [(r.key, r.distance) for r in union] == [(r.key, r.distance) for r in plain]

    def test_disjoint_neighbor_sets_concatenate(self):
        orig = VectorSpace("orig", 1, {"q": (0,), "a": (1,), "b": (2,), "c": (50,), "d": (60,)})
        retro = VectorSpace("retro", 1, {"q": (100,), "a": (1,), "b": (2,), "c": (99,), "d": (101,)})
        out = union_knn(orig, retro, "q", 3)
        orig_top = {r.key for r in knn(orig, orig["q"], 3)}
        retro_top = {r.key for r in knn(retro, retro["q"], 3)}
        assert {r.key for r in out} == orig_top | retro_top

    def test_shared_neighbor_tagged_both(self):
        orig = VectorSpace("orig", 1, {"q": (0,), "a": (1,), "b": (10,)})
        retro = VectorSpace("retro", 1, {"q": (0,), "a": (2,), "b": (30,)})
        out = union_knn(orig, retro, "q", 2)
        rec = {r.key: r for r in out}
        assert rec["a"].source_spaces == ("orig", "retro")
        assert rec["a"].distance == 1.0  # min of the two distances

    def test_missing_key_names_space(self):
        orig = VectorSpace("orig", 1, {"q": (0,)})
        retro = VectorSpace("retro", 1, {"other": (0,)})
        with pytest.raises(KeyMissing) as err:
            union_knn(orig, retro, "q", 1)
        assert err.value.space_name == "retro"


class TestTermAndMeanVectors:
    def test_single_token_identity(self):
        space = VectorSpace("w", 2, {"x": (1, 0)})
        term = make_label("l1", "x")
        assert list(term_vector(term, space)) == [1, 0]

    def test_multi_token_mean(self):
        space = VectorSpace("w", 2, {"roi": (1, 0), "david": (0, 1)})
        term = make_label("l1", "roi david")
        assert list(term_vector(term, space)) == [0.5, 0.5]

    def test_out_of_vocabulary(self):
        space = VectorSpace("w", 2, {"x": (1, 0)})
        term = make_label("l1", "q")
        with pytest.raises(NoVector):
            term_vector(term, space)

    def test_mean_vector_single(self):
        space = VectorSpace("s", 2, {"a": (3, 4)})
        vec, skipped = mean_vector(["a"], space)
        assert list(vec) == [3, 4] and skipped == 0

    def test_mean_vector_pair(self):
        space = VectorSpace("s", 2, {"a": (0, 0), "b": (2, 2)})
        vec, skipped = mean_vector(["a", "b"], space)
        assert list(vec) == [1, 1] and skipped == 0

    def test_mean_vector_skips_unresolvable(self):
        space = VectorSpace("s", 2, {"a": (0, 0), "b": (2, 2)})
        vec, skipped = mean_vector(["a", "b", "zzz"], space)
        assert list(vec) == [1, 1] and skipped == 1

    def test_mean_vector_none_resolve(self):
        space = VectorSpace("s", 2, {"a": (0, 0)})
        with pytest.raises(NoVector):
            mean_vector(["q", "r"], space)


class TestMetricBasics:
    @given(st.integers(0, 2**31))
    @settings(max_examples=20, deadline=None)
    def test_self_distance_zero_and_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        entries = {f"k{i}": rng.normal(size=4) for i in range(5)}
        space = VectorSpace("s", 4, entries)
        for key, vec in space.items():
            top = knn(space, vec, 1)
            assert top[0].distance == 0.0
        a, b = space["k0"], space["k1"]
        assert math.dist(a, b) == math.dist(b, a)


class TestVectorFiles:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        space = VectorSpace("s", 3, {f"k{i}": rng.normal(size=3) for i in range(7)})
        path = tmp_path / "space.txt"
        write_vector_file(space, path)
        back = read_vector_file(path, "s")
        assert back.keys() == space.keys()
        for key, vec in space.items():
            assert list(back[key]) == list(vec)

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\nтолько one 1.0 2.0\n")
        with pytest.raises(ParseError):
            read_vector_file(path, "s")

    def test_bad_component_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 3\nkey 1.0 2.0\n")
        with pytest.raises(ParseError):
            read_vector_file(path, "s")
