import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scriptorium.corpus import ImageRecord, Manuscript
from scriptorium.errors import EmptySelection, NoVector
from scriptorium.simgraph import (
    build_graph,
    combine_metrics,
    manuscript_similarity,
    overlay_values,
    selection_summary,
)
from scriptorium.vecspace import VectorSpace

from conftest import build_corpus, make_label


def corpus_with_image_vectors(vectors_by_ms: dict[str, list]):
    """Corpus where manuscript k has images with the given image vectors."""
    manuscripts, images, entries = [], [], {}
    dim = len(next(iter(vectors_by_ms.values()))[0])
    for n, (ms_id, vecs) in enumerate(sorted(vectors_by_ms.items())):
        img_ids = []
        for i, vec in enumerate(vecs):
            img_id = f"{ms_id}-img{i}"
            img_ids.append(img_id)
            images.append(ImageRecord(id=img_id, manuscript_id=ms_id, dataset="A" if n % 2 else "B", folio="1r"))
            entries[img_id] = vec
        manuscripts.append(Manuscript(id=ms_id, dataset="A" if n % 2 else "B", shelfmark=ms_id, image_ids=img_ids))
    return build_corpus(manuscripts, images, [], spaces={"image": VectorSpace("image", dim, entries)})


class TestManuscriptSimilarity:
    def test_identical_image_sets_give_one(self):
        corpus = corpus_with_image_vectors({"m1": [(1.0, 2.0)], "m2": [(1.0, 2.0)]})
        sim = manuscript_similarity(corpus.manuscripts["m1"], corpus.manuscripts["m2"], "image", corpus)
        assert sim == 1.0

    def test_three_four_five_distance(self):
        corpus = corpus_with_image_vectors({"m1": [(0.0, 0.0)], "m2": [(3.0, 4.0)]})
        sim = manuscript_similarity(corpus.manuscripts["m1"], corpus.manuscripts["m2"], "image", corpus)
        assert sim == pytest.approx(1 / 6, abs=1e-9)

    def test_symmetry(self):
        corpus = corpus_with_image_vectors({"m1": [(0.0, 1.0), (2.0, 0.0)], "m2": [(5.0, 5.0)]})
        a = manuscript_similarity(corpus.manuscripts["m1"], corpus.manuscripts["m2"], "image", corpus)
        b = manuscript_similarity(corpus.manuscripts["m2"], corpus.manuscripts["m1"], "image", corpus)
        assert a == b
        assert 0 < a <= 1

    def test_no_labeled_images_raises(self, tiny_corpus):
        # m2's images: img3 has labels, img4 does not; strip img3's labels
        tiny_corpus.images["img3"].label_ids.clear()
        with pytest.raises(NoVector):
            manuscript_similarity(
                tiny_corpus.manuscripts["m2"], tiny_corpus.manuscripts["m1"], "label", tiny_corpus
            )


class TestCombineMetrics:
    def test_mean_of_two(self):
        assert combine_metrics({"image": 0.2, "label": 0.4}) == pytest.approx(0.3)

    def test_single_identity(self):
        assert combine_metrics({"label": 0.77}) == pytest.approx(0.77)

    def test_mean_of_three(self):
        assert combine_metrics({"image": 0.1, "label": 0.2, "description": 0.6}) == pytest.approx(0.3)


class TestBuildGraph:
    def test_mutual_top1_keeps_only_strongest(self):
        # Oracle: brute-force the kept-by-both rule over explicit pairwise
        # values ab=0.9, ac=0.5, bc=0.4 (vectors placed to produce them).
        def d_for(value):
            return 1.0 / value - 1.0

        corpus = corpus_with_image_vectors(
            {
                "a": [(0.0, 0.0)],
                "b": [(d_for(0.9), 0.0)],
                "c": [(0.0, d_for(0.5))],
            }
        )
        # bc distance is sqrt(d(0.9)^2 + d(0.5)^2) ~ 1.006 -> value ~ 0.498; adjust c so bc ~= 0.4:
        # keep simple: verify oracle on actual computed values instead of forcing exact figures.
        values = {}
        for u, v in itertools.combinations(sorted(corpus.manuscripts), 2):
            values[(u, v)] = manuscript_similarity(corpus.manuscripts[u], corpus.manuscripts[v], "image", corpus)
        expected = mutual_top_k_oracle(sorted(corpus.manuscripts), values, max_degree=1, threshold=0.0)

        graph = build_graph(corpus, ["image"], max_degree=1, threshold=0.0)
        assert {(e.u, e.v) for e in graph.edges} == expected
        assert expected == {("a", "b")}  # ab is the strongest pair for both a and b

    def test_threshold_one_empty(self):
        corpus = corpus_with_image_vectors({"m1": [(0.0, 0.0)], "m2": [(1.0, 0.0)], "m3": [(0.0, 2.0)]})
        graph = build_graph(corpus, ["image"], max_degree=5, threshold=1.0)
        assert graph.edges == []

    def test_unconstrained_complete_graph(self):
        corpus = corpus_with_image_vectors({f"m{i}": [(float(i), 0.0)] for i in range(4)})
        graph = build_graph(corpus, ["image"], max_degree=3, threshold=0.0)
        assert len(graph.edges) == 6

    def test_node_payload(self):
        corpus = corpus_with_image_vectors({"m1": [(0.0, 0.0), (1.0, 1.0)], "m2": [(3.0, 3.0)]})
        graph = build_graph(corpus, ["image"], max_degree=2, threshold=0.0)
        counts = {n.manuscript_id: n.image_count for n in graph.nodes}
        assert counts == {"m1": 2, "m2": 1}

    @settings(max_examples=30, deadline=None)
    @given(
        n=st.integers(2, 8),
        max_degree=st.integers(1, 6),
        threshold=st.floats(0.0, 1.0),
        seed=st.integers(0, 2**31),
    )
    def test_structural_invariants(self, n, max_degree, threshold, seed):
        rng = np.random.default_rng(seed)
        corpus = corpus_with_image_vectors({f"m{i:02d}": [tuple(rng.normal(size=3))] for i in range(n)})
        graph = build_graph(corpus, ["image"], max_degree=max_degree, threshold=threshold)
        degree = {}
        for e in graph.edges:
            assert e.u != e.v
            assert e.u < e.v
            assert e.value >= threshold
            degree[e.u] = degree.get(e.u, 0) + 1
            degree[e.v] = degree.get(e.v, 0) + 1
        assert all(d <= max_degree for d in degree.values())

    def test_scale_invariant_ranking(self):
        rng = np.random.default_rng(5)
        vecs = {f"m{i:02d}": [tuple(rng.normal(size=4))] for i in range(6)}
        corpus = corpus_with_image_vectors(vecs)
        scaled = corpus_with_image_vectors({k: [tuple(np.asarray(v[0]) * 3.7)] for k, v in vecs.items()})
        g1 = build_graph(corpus, ["image"], max_degree=3, threshold=0.0)
        g2 = build_graph(scaled, ["image"], max_degree=3, threshold=0.0)
        assert {(e.u, e.v) for e in g1.edges} == {(e.u, e.v) for e in g2.edges}

    def test_overlay_values_on_existing_edges(self, tiny_corpus):
        graph = build_graph(tiny_corpus, ["image"], max_degree=3, threshold=0.0)
        overlay = overlay_values(graph, tiny_corpus, "label")
        assert set(overlay) == {(e.u, e.v) for e in graph.edges}


def mutual_top_k_oracle(nodes, values, max_degree, threshold):
    """Brute-force reimplementation of threshold + kept-by-both."""
    survivors = {pair: v for pair, v in values.items() if v >= threshold}
    keep = {}
    for node in nodes:
        mine = [(pair, v) for pair, v in survivors.items() if node in pair]
        mine.sort(key=lambda pv: (-pv[1], pv[0]))
        keep[node] = {pair for pair, _ in mine[:max_degree]}
    return {pair for pair in survivors if pair in keep[pair[0]] and pair in keep[pair[1]]}


class TestSelectionSummary:
    def test_single_manuscript_counts(self):
        corpus = corpus_with_image_vectors({"m1": [(float(i), 0.0) for i in range(10)]})
        summary = selection_summary(["m1"], corpus)
        assert summary.image_counts == {"m1": 10}

    def test_decade_bins(self, tiny_corpus):
        # Oracle: brute-force bin membership for 1240-1260 and 1250-1270.
        expected = {}
        for start, end in [(1240, 1260), (1250, 1270)]:
            for decade in range(1240, 1280, 10):
                if start <= decade + 9 and end >= decade:
                    expected[decade] = expected.get(decade, 0) + 1
        summary = selection_summary(["m1", "m2"], tiny_corpus)
        assert summary.decade_histogram == expected
        assert expected == {1240: 1, 1250: 2, 1260: 2, 1270: 1}

    def test_label_cloud_sorted_descending(self, tiny_corpus):
        summary = selection_summary(["m1", "m2"], tiny_corpus)
        counts = [c for _, c in summary.label_frequencies]
        assert counts == sorted(counts, reverse=True)
        assert summary.label_frequencies[0] == ("l-crane", 2)

    def test_unlabeled_selection_empty_cloud(self, tiny_corpus):
        for img in tiny_corpus.images.values():
            img.label_ids.clear()
        summary = selection_summary(["m1"], tiny_corpus)
        assert summary.label_frequencies == []

    def test_empty_selection_raises(self, tiny_corpus):
        with pytest.raises(EmptySelection):
            selection_summary([], tiny_corpus)
