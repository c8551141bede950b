"""Acceptance suite: one test per release criterion, each printing a
PASS line (run with -s to see them). Tolerances are pinned here and
nowhere else; oracles are implemented independently of the code paths
they check."""

import itertools
import math
import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from scriptorium.annotation import AnnotationStore, replay, state_fingerprint
from scriptorium.corpus import ImageRecord, Manuscript, clone_corpus, load_corpus
from scriptorium.embedding2d import embed_2d
from scriptorium.engine import Workspace
from scriptorium.fixture import generate_fixture
from scriptorium.hierarchy import AddEdge, AddNode, LabelHierarchy
from scriptorium.recommend import build_cooccurrence
from scriptorium.retrofit import RetrofitParams, retrofit
from scriptorium.service import create_app
from scriptorium.simgraph import build_graph, combine_metrics, manuscript_similarity
from scriptorium.snapshots import SnapshotStore
from scriptorium.sugiyama import (
    LayoutParams,
    _components,
    assign_layers,
    coordinate_objective,
    count_crossings,
    detect_cycles,
    initial_order,
    insert_dummies,
    layered_layout,
    order_layers,
)
from scriptorium.vecspace import VectorSpace, knn, union_knn
from scriptorium.projection import project_2d

from conftest import build_corpus, make_label
from test_hierarchy import exhaustive_min_total_edge_length, random_dag, total_edge_length


def report(name):
    print(f"PASS: {name}")


# ---------------------------------------------------------------------------


def test_knn_oracle_equivalence():
    """knn output equals a brute-force full-scan sort on 100 random
    spaces (<=1000 entries, d in {4,16,64}), exactly, in under 10 s."""
    started = time.monotonic()
    rng = np.random.default_rng(1234)
    for trial in range(100):
        n = int(rng.integers(10, 1001))
        d = int(rng.choice([4, 16, 64]))
        keys = [f"k{i:04d}" for i in range(n)]
        matrix = rng.normal(size=(n, d))
        space = VectorSpace("s", d, dict(zip(keys, matrix)))
        for _ in range(2):
            query = rng.normal(size=d)
            k = int(rng.integers(1, n + 1))
            got = knn(space, query, k)
            # independent oracle: stdlib math.dist plus a plain sort
            oracle = sorted(((math.dist(vec, query), key) for key, vec in zip(keys, matrix)))[:k]
            assert [r.key for r in got] == [key for _, key in oracle]
            for r, (dist, _) in zip(got, oracle):
                assert abs(r.distance - dist) < 1e-9
    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    report(f"k-NN oracle equivalence (100 spaces, {elapsed:.1f}s)")


def test_layer_assignment_optimality():
    """Network-simplex total edge length equals the exhaustive minimum on
    200 random DAGs with <= 8 nodes, tolerance 0, in under 30 s."""
    started = time.monotonic()
    rng = random.Random(99)
    for trial in range(200):
        nodes, edges = random_dag(rng, max_nodes=8)
        layers = assign_layers(nodes, edges)
        for u, v in edges:
            assert layers[v] - layers[u] >= 1
        got = total_edge_length(layers, edges)
        want = exhaustive_min_total_edge_length(nodes, edges)
        assert got == want, f"trial {trial}: {got} != {want} on {sorted(edges)}"
    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    report(f"layer-assignment optimality (200 DAGs, {elapsed:.1f}s)")


def test_crossing_non_increase():
    """Barycenter ordering never increases crossings on 500 random
    layered graphs, checked with an explicit O(E^2) counter."""

    def oracle_crossings(order, segments, layers):
        # written separately from the library counter on purpose
        total = 0
        for li in range(len(order) - 1):
            top = {n: p for p, n in enumerate(order[li])}
            bottom = {n: p for p, n in enumerate(order[li + 1])}
            spans = [(top[u], bottom[v]) for u, v in segments if u in top and v in bottom]
            for (a1, b1), (a2, b2) in itertools.combinations(spans, 2):
                if (a1 - a2) * (b1 - b2) < 0:
                    total += 1
        return total

    rng = random.Random(321)
    violations = 0
    for _ in range(500):
        n_layers = rng.randint(2, 5)
        layers = {f"n{i:02d}": rng.randrange(n_layers) for i in range(rng.randint(4, 14))}
        segments = set()
        for u in layers:
            for v in layers:
                if layers[v] == layers[u] + 1 and rng.random() < 0.35:
                    segments.add((u, v))
        before = oracle_crossings(initial_order(layers), segments, layers)
        after = oracle_crossings(order_layers(layers, segments), segments, layers)
        if after > before:
            violations += 1
    assert violations == 0
    report("crossing non-increase (500 graphs, 0 violations)")


def test_coordinate_objective_descent():
    """Q(final) <= Q(initial) on every random instance; chains reach an
    objective within 1e-6 of zero."""
    rng = random.Random(4)
    params = LayoutParams()
    for _ in range(60):
        nodes, edges = random_dag(rng, max_nodes=8)
        forward, _ = detect_cycles(nodes, edges)
        layers = assign_layers(nodes, forward)
        aug_layers, segments, chains = insert_dummies(layers, forward)
        order = order_layers(aug_layers, segments)
        comps = _components(set(aug_layers), segments)
        x_init = {n: i * params.min_gap for layer in order for i, n in enumerate(layer)}
        q_init = coordinate_objective(x_init, forward, chains, comps, params)
        result = layered_layout(nodes, edges, params)
        x_final = {n: result.coords[n][0] for n in aug_layers}
        q_final = coordinate_objective(x_final, forward, chains, comps, params)
        assert q_final <= q_init + 1e-9

    for length in (2, 3, 6, 10):
        chain_nodes = {f"c{i}" for i in range(length)}
        chain_edges = {(f"c{i}", f"c{i+1}") for i in range(length - 1)}
        result = layered_layout(chain_nodes, chain_edges, params)
        x = {n: result.coords[n][0] for n in chain_nodes}
        q = coordinate_objective(x, chain_edges, {}, [sorted(chain_nodes)], params)
        assert q < 1e-6
    report("coordinate objective descent + chain optimality")


def test_retrofit_contraction_and_convergence():
    """On random connected label graphs (<=200 nodes, d=16): every
    connected pair with distinct originals is strictly closer after one
    iteration; max displacement at iteration 10 < 1e-2, defaults."""
    for seed in range(12):
        rng = random.Random(seed)
        nrng = np.random.default_rng(seed)
        n = rng.randint(5, 200)
        names = [f"l{i:03d}" for i in range(n)]
        hierarchy = LabelHierarchy()
        for name in names:
            hierarchy.apply(AddNode(name), "u", "t")
        for i in range(1, n):
            hierarchy.apply(AddEdge(names[rng.randrange(i)], names[i]), "u", "t")
        for _ in range(rng.randrange(n)):
            a, b = rng.sample(names, 2)
            if (a, b) not in hierarchy.edges:
                hierarchy.apply(AddEdge(a, b), "u", "t")
        space = VectorSpace("w", 16, {k: nrng.normal(size=16) for k in names})

        one = retrofit(space, hierarchy, RetrofitParams(iterations=1))
        for u, v in hierarchy.edge_set() - hierarchy.back_edges():
            before = float(np.linalg.norm(space[u] - space[v]))
            after = float(np.linalg.norm(one.space[u] - one.space[v]))
            if before > 1e-12:
                assert after < before, (u, v, before, after)

        ten = retrofit(space, hierarchy, RetrofitParams(iterations=10))
        assert ten.displacements[-1] < 1e-2
    report("retrofit contraction after 1 iteration; displacement@10 < 1e-2")


def test_union_nn_law():
    """union_knn(S, S, ., k) == knn(S, ., k) on 100 random cases; for
    independent spaces the result set equals the brute-force union."""
    rng = np.random.default_rng(77)
    for trial in range(100):
        n = int(rng.integers(3, 60))
        d = int(rng.integers(2, 8))
        keys = [f"k{i:03d}" for i in range(n)]
        space = VectorSpace("s", d, {k: rng.normal(size=d) for k in keys})
        query_key = keys[int(rng.integers(0, n))]
        k = int(rng.integers(1, n + 1))
        plain = knn(space, space[query_key], k)
        union = union_knn(space, space, query_key, k)
        assert [(r.key, r.distance) for r in union] == [(r.key, r.distance) for r in plain]

        other = VectorSpace("o", d, {key: rng.normal(size=d) for key in keys})
        both = union_knn(space, other, query_key, k)
        want = {r.key for r in knn(space, space[query_key], k)} | {r.key for r in knn(other, other[query_key], k)}
        assert {r.key for r in both} == want
    report("union nearest-neighbor law (100 cases, 0 violations)")


def test_cooccurrence_incremental_consistency():
    """After 1000 random set_label mutations the incrementally maintained
    matrix equals a full rebuild exactly; symmetry and diagonal=frequency
    hold throughout."""
    labels = [make_label(f"l{i:02d}", f"terme{i:02d}") for i in range(12)]
    images = [
        ImageRecord(id=f"img{i:02d}", manuscript_id="m", dataset="A" if i % 2 else "B", folio="1r")
        for i in range(30)
    ]
    ms = Manuscript(id="m", dataset="A", shelfmark="s", image_ids=[i.id for i in images])
    corpus = build_corpus([ms], images, labels)
    store = AnnotationStore(corpus)
    rng = random.Random(5)
    mutations = 0
    while mutations < 1000:
        image_id = f"img{rng.randrange(30):02d}"
        label_id = f"l{rng.randrange(12):02d}"
        present = label_id not in corpus.images[image_id].label_ids
        store.set_label(image_id, label_id, present, "u")
        mutations += 1

        fresh = build_cooccurrence(corpus)
        assert store.matrix.pair_counts == fresh.pair_counts
        assert store.matrix.diagonal == fresh.diagonal
        for a, b in store.matrix.pair_counts:
            assert store.matrix.count(a, b) == store.matrix.count(b, a)
        for label in store.matrix.diagonal:
            carried = sum(1 for img in corpus.images.values() if label in img.label_ids)
            assert store.matrix.diagonal[label] == carried
    report("co-occurrence incremental == rebuild over 1000 mutations")


def test_event_sourcing_replay_equality():
    """replay(log) equals live state after 50 random sessions of 500
    mutations each. Exact fingerprint equality."""
    labels = [make_label(f"l{i:02d}", f"mot{i:02d}") for i in range(10)]
    images = [
        ImageRecord(id=f"img{i:02d}", manuscript_id="m", dataset="A" if i % 2 else "B", folio="1r")
        for i in range(20)
    ]
    ms = Manuscript(id="m", dataset="A", shelfmark="s", image_ids=[i.id for i in images])
    pristine = build_corpus([ms], images, labels)

    surfaces = ["pupitre", "chantre", "hybride", "ange", "dragon", "navire", "tour"]
    categories = ["descriptive", "decorative", "interpretive"]
    for session in range(50):
        rng = random.Random(session)
        live = AnnotationStore(clone_corpus(pristine))
        applied = 0
        while applied < 500:
            roll = rng.random()
            try:
                if roll < 0.6:
                    image_id = f"img{rng.randrange(20):02d}"
                    label_id = rng.choice(sorted(live.corpus.labels))
                    present = label_id not in live.corpus.images[image_id].label_ids
                    live.set_label(image_id, label_id, present, rng.choice(["u1", "u2"]))
                elif roll < 0.7:
                    live.create_label(f"{rng.choice(surfaces)} {rng.randrange(200)}", "u1")
                elif roll < 0.8:
                    live.categorize_label(rng.choice(sorted(live.corpus.labels)), rng.choice(categories), "u2")
                elif roll < 0.9:
                    live.mutate_hierarchy(AddNode(rng.choice(sorted(live.corpus.labels))), "u1")
                else:
                    nodes = sorted(live.hierarchy.nodes)
                    if len(nodes) >= 2:
                        a, b = rng.sample(nodes, 2)
                        live.mutate_hierarchy(AddEdge(a, b), "u2")
                    else:
                        continue
                applied += 1
            except Exception:
                continue
        rebuilt = replay(live.history, clone_corpus(pristine))
        assert state_fingerprint(rebuilt) == state_fingerprint(live)
    report("event-sourcing replay equality (50 sessions x 500 mutations)")


def test_projection_determinism_and_cluster_preservation():
    """Identical (inputs, basis, seed) produce bitwise-identical
    coordinates; a 10-sigma two-cluster fixture keeps >=90% same-cluster
    nearest neighbors in 2D."""
    rng = np.random.default_rng(6)
    vectors = {f"img{i:03d}": rng.normal(size=8) for i in range(40)}
    images = [ImageRecord(id=k, manuscript_id="m", dataset="A", folio="1r") for k in sorted(vectors)]
    ms = Manuscript(id="m", dataset="A", shelfmark="s", image_ids=sorted(vectors))
    corpus = build_corpus([ms], images, [], spaces={"image": VectorSpace("image", 8, vectors)})
    store = SnapshotStore()
    ids = sorted(vectors)
    first = project_2d(ids, ["image"], 11, corpus, store)
    second = project_2d(ids, ["image"], 11, corpus, store)
    assert first.coords == second.coords  # bitwise: same floats via same ops

    cluster_rng = np.random.default_rng(0)
    c1 = cluster_rng.normal(0.0, 1.0, size=(80, 16))
    c2 = cluster_rng.normal(0.0, 1.0, size=(80, 16)) + 12.0
    X = np.vstack([c1, c2])
    labels = np.array([0] * 80 + [1] * 80)
    Y = embed_2d(X, seed=9)
    d2 = ((Y[:, None, :] - Y[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    fraction = float((labels[d2.argmin(1)] == labels).mean())
    assert fraction >= 0.9, fraction
    report(f"projection determinism + cluster preservation ({fraction:.0%})")


def test_graph_filter_invariants_and_metric_mean():
    """Degree cap and threshold hold for all parameter settings on random
    corpora; combined metric equals the arithmetic mean within 1e-12."""
    rng = np.random.default_rng(13)
    for trial in range(15):
        n_ms = int(rng.integers(2, 9))
        vectors = {}
        manuscripts, images = [], []
        for m in range(n_ms):
            ms_id = f"m{m:02d}"
            img_ids = []
            for i in range(int(rng.integers(1, 4))):
                img_id = f"{ms_id}-i{i}"
                img_ids.append(img_id)
                vectors[img_id] = rng.normal(size=4)
                images.append(ImageRecord(id=img_id, manuscript_id=ms_id, dataset="A", folio="1r"))
            manuscripts.append(Manuscript(id=ms_id, dataset="A", shelfmark=ms_id, image_ids=img_ids))
        corpus = build_corpus(manuscripts, images, [], spaces={"image": VectorSpace("image", 4, vectors)})
        for max_degree in (1, 2, 5):
            for threshold in (0.0, 0.3, 0.7, 1.0):
                graph = build_graph(corpus, ["image"], max_degree, threshold)
                degree = {}
                for e in graph.edges:
                    assert e.value >= threshold
                    degree[e.u] = degree.get(e.u, 0) + 1
                    degree[e.v] = degree.get(e.v, 0) + 1
                assert all(d <= max_degree for d in degree.values())

    values = {"image": 0.2, "label": 0.4, "description": 0.9}
    assert abs(combine_metrics(values) - (0.2 + 0.4 + 0.9) / 3) < 1e-12
    assert abs(combine_metrics({"image": 0.37}) - 0.37) < 1e-12
    report("graph filter invariants + combined-metric mean")


def test_fixture_scale_end_to_end(tmp_path):
    """Full pipeline via the API only, on a fixture mirroring the source
    corpora proportions (two datasets, shared-label fraction ~ 279/1985),
    completing in under 60 s."""
    started = time.monotonic()
    manifest = generate_fixture(7, 12, 300, 120, 16, tmp_path / "data", shared_fraction=279 / 1985)
    workspace = Workspace(load_corpus(manifest), data_dir=tmp_path / "state")
    app = create_app(workspace, debounce_ms=50)
    with TestClient(app) as client:
        summary = client.get("/corpus/summary").json()["summary"]
        assert summary["labels"] == 120
        shared = summary["labels_by_origin"]["both"]
        assert shared == round(120 * 279 / 1985)

        graph = client.get("/graph", params={"metrics": "image,label", "max_degree": 4, "threshold": 0.05}).json()
        assert graph["nodes"]

        images = sorted(workspace.corpus.images)[:120]
        posted = client.post("/projections", json={"image_ids": images, "basis": ["image"], "seed": 7})
        assert posted.status_code == 202
        job_id = posted.json()["job_id"]
        while True:
            job = client.get(f"/jobs/{job_id}").json()
            if job["state"] in ("done", "failed"):
                break
            time.sleep(0.05)
        assert job["state"] == "done"
        snapshot = client.get(f"/projections/{job['output_snapshot_id']}").json()
        assert len(snapshot["payload"]["coords"]) > 0

        labeled_image = next(i for i in sorted(workspace.corpus.images) if workspace.corpus.images[i].label_ids)
        selected_label = sorted(workspace.corpus.images[labeled_image].label_ids)[0]
        words = client.post("/recs/word-space", json={"selected": [selected_label], "k": 10}).json()
        assert words["recommendations"]
        cooc = client.post("/recs/cooccurrence", json={"selected": [selected_label], "limit": 10}).json()
        assert isinstance(cooc["recommendations"], list)
        neigh = client.post("/recs/image-neighbors", json={"image_ids": [labeled_image], "k_images": 8, "limit": 10}).json()
        assert isinstance(neigh["recommendations"], list)

        in_space = sorted(workspace.label_space.keys())
        parent, child = in_space[0], in_space[1]
        client.post("/hierarchy/nodes", json={"node_id": parent, "user": "u"})
        client.post("/hierarchy/nodes", json={"node_id": child, "user": "u"})
        edge = client.post("/hierarchy/edges", json={"parent": parent, "child": child, "user": "u"})
        assert edge.status_code == 201
        layout = client.get("/hierarchy/layout").json()
        assert layout["layers"][child] == layout["layers"][parent] + 1

        assert app.state.scheduler.wait_idle(45)
        retro_snaps = client.get("/snapshots", params={"kind": "retrofit"}).json()["snapshots"]
        assert retro_snaps
        assert workspace.retro_space is not None
        d_before = float(np.linalg.norm(workspace.label_space[parent] - workspace.label_space[child]))
        d_after = float(np.linalg.norm(workspace.retro_space[parent] - workspace.retro_space[child]))
        assert d_after < d_before

        union = client.post("/recs/word-space", json={"selected": [parent], "k": 10}).json()
        assert union["recommendations"]

    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    report(f"fixture-scale end-to-end via API ({elapsed:.1f}s)")
