import random

import numpy as np
import pytest

from scriptorium.hierarchy import AddEdge, AddNode, LabelHierarchy
from scriptorium.retrofit import ConvergenceReport, RetrofitParams, convergence_report, retrofit
from scriptorium.vecspace import VectorSpace


def hierarchy_of(nodes, edges):
    h = LabelHierarchy()
    for n in nodes:
        h.apply(AddNode(n), "u", "t")
    for u, v in edges:
        h.apply(AddEdge(u, v), "u", "t")
    return h


def random_connected_hierarchy(rng, n):
    names = [f"l{i:03d}" for i in range(n)]
    h = hierarchy_of(names, [])
    for i in range(1, n):
        h.apply(AddEdge(names[rng.randrange(i)], names[i]), "u", "t")
    for _ in range(rng.randrange(n)):
        a, b = rng.sample(names, 2)
        if (a, b) not in h.edges:
            h.apply(AddEdge(a, b), "u", "t")
    return names, h


class TestUpdateRule:
    def test_isolated_node_unchanged(self):
        h = hierarchy_of(["a", "b", "c"], [("a", "b")])
        space = VectorSpace("w", 2, {"a": (1, 0), "b": (0, 1), "c": (5, 5)})
        result = retrofit(space, h)
        assert list(result.space["c"]) == [5, 5]

    def test_one_sweep_hand_computed(self):
        # alpha=1, beta=1, one in-place sweep in lexicographic order:
        # q1 <- ((1,0)+(0,1))/2 = (.5,.5); q2 <- ((0,1)+(.5,.5))/2 = (.25,.75)
        h = hierarchy_of(["q1", "q2"], [("q1", "q2")])
        space = VectorSpace("w", 2, {"q1": (1.0, 0.0), "q2": (0.0, 1.0)})
        result = retrofit(space, h, RetrofitParams(alpha=1.0, beta=1.0, iterations=1))
        assert np.allclose(result.space["q1"], [0.5, 0.5])
        assert np.allclose(result.space["q2"], [0.25, 0.75])

    def test_beta_zero_returns_original(self):
        h = hierarchy_of(["a", "b"], [("a", "b")])
        space = VectorSpace("w", 2, {"a": (1, 0), "b": (0, 1)})
        result = retrofit(space, h, RetrofitParams(beta=0.0, iterations=5))
        for key, vec in space.items():
            assert np.array_equal(result.space[key], vec)
        assert all(d == 0.0 for d in result.displacements)

    def test_empty_hierarchy_copies_space(self):
        space = VectorSpace("w", 2, {"a": (1, 2), "b": (3, 4)})
        result = retrofit(space, LabelHierarchy())
        assert result.space.keys() == space.keys()
        for key, vec in space.items():
            assert np.array_equal(result.space[key], vec)

    def test_original_space_untouched(self):
        h = hierarchy_of(["a", "b"], [("a", "b")])
        space = VectorSpace("w", 2, {"a": (1.0, 0.0), "b": (0.0, 1.0)})
        retrofit(space, h)
        assert list(space["a"]) == [1.0, 0.0]

    def test_nodes_without_vectors_skipped(self):
        h = hierarchy_of(["a", "b", "ghost"], [("a", "b"), ("a", "ghost")])
        space = VectorSpace("w", 2, {"a": (1, 0), "b": (0, 1)})
        result = retrofit(space, h)
        assert result.skipped == ["ghost"]

    def test_back_edges_excluded_by_default(self):
        h = hierarchy_of(["a", "b"], [("a", "b"), ("b", "a")])  # 2-cycle: one back edge
        space = VectorSpace("w", 2, {"a": (1.0, 0.0), "b": (0.0, 1.0)})
        with_back = retrofit(space, h, RetrofitParams(include_back_edges=True, iterations=1))
        without = retrofit(space, h, RetrofitParams(iterations=1))
        # symmetrized adjacency is the same single pair either way
        assert np.allclose(with_back.space["a"], without.space["a"])

    def test_version_stamped_name(self):
        h = hierarchy_of(["a", "b"], [("a", "b")])
        space = VectorSpace("word", 2, {"a": (1, 0), "b": (0, 1)})
        assert retrofit(space, h).space.name == f"word.retro.v{h.version}"

    def test_deterministic(self):
        rng = random.Random(1)
        names, h = random_connected_hierarchy(rng, 30)
        nrng = np.random.default_rng(1)
        space = VectorSpace("w", 8, {k: nrng.normal(size=8) for k in names})
        r1 = retrofit(space, h)
        r2 = retrofit(space, h)
        for key in names:
            assert np.array_equal(r1.space[key], r2.space[key])


class TestContractionProperties:
    def test_connected_pairs_strictly_closer_after_one_iteration(self):
        for seed in range(8):
            rng = random.Random(seed)
            nrng = np.random.default_rng(seed)
            n = rng.randint(5, 120)
            names, h = random_connected_hierarchy(rng, n)
            space = VectorSpace("w", 16, {k: nrng.normal(size=16) for k in names})
            result = retrofit(space, h, RetrofitParams(iterations=1))
            for u, v in h.edge_set() - h.back_edges():
                before = np.linalg.norm(space[u] - space[v])
                after = np.linalg.norm(result.space[u] - result.space[v])
                if before > 1e-12:
                    assert after < before

    def test_fixed_point_shared_vector(self):
        h = hierarchy_of(["a", "b", "c"], [("a", "b"), ("b", "c")])
        space = VectorSpace("w", 2, {"a": (2.0, 2.0), "b": (2.0, 2.0), "c": (2.0, 2.0)})
        result = retrofit(space, h)
        for key, vec in space.items():
            assert np.allclose(result.space[key], vec)
        assert all(d < 1e-12 for d in result.displacements)


class TestConvergenceReport:
    def test_ten_iterations_converge_on_fixture(self):
        rng = random.Random(9)
        nrng = np.random.default_rng(9)
        names, h = random_connected_hierarchy(rng, 60)
        space = VectorSpace("w", 16, {k: nrng.normal(size=16) for k in names})
        result = retrofit(space, h, RetrofitParams(iterations=10))
        report = convergence_report(result.displacements)
        assert report.final_displacement < 1e-2
        assert report.non_increasing

    def test_single_iteration_single_value(self):
        report = convergence_report([0.5])
        assert report.per_iteration == [0.5]
        assert report.final_displacement == 0.5

    def test_beta_zero_all_displacements_zero(self):
        h = hierarchy_of(["a", "b"], [("a", "b")])
        space = VectorSpace("w", 2, {"a": (1, 0), "b": (0, 1)})
        result = retrofit(space, h, RetrofitParams(beta=0.0, iterations=4))
        report = convergence_report(result.displacements)
        assert report.per_iteration == [0.0, 0.0, 0.0, 0.0]

    def test_empty_record_rejected(self):
        with pytest.raises(ValueError):
            convergence_report([])
