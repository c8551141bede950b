"""Manuscript-level similarity and the filtered manuscript graph.

Each metric compares two manuscripts through the Euclidean distance of
their mean vectors in one ingested space (image embeddings, label word
vectors, description embeddings), mapped to (0, 1] via 1 / (1 + d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional
from xml.sax.saxutils import escape

import numpy as np

from .corpus import Corpus, Manuscript
from .errors import EmptySelection, NoVector
from .vecspace import VectorSpace, term_vector

METRICS = ("image", "label", "description")


@dataclass(frozen=True)
class GraphNode:
    manuscript_id: str
    dataset: str
    image_count: int


@dataclass(frozen=True)
class GraphEdge:
    u: str
    v: str
    value: float


@dataclass
class ManuscriptGraph:
    nodes: list[GraphNode]
    edges: list[GraphEdge]
    metrics: tuple[str, ...]
    max_degree: int
    threshold: float

    def to_json(self) -> dict:
        return {
            "nodes": [{"manuscript_id": n.manuscript_id, "dataset": n.dataset, "image_count": n.image_count} for n in self.nodes],
            "edges": [{"u": e.u, "v": e.v, "value": e.value} for e in self.edges],
            "params": {"metrics": list(self.metrics), "max_degree": self.max_degree, "threshold": self.threshold},
        }

    def to_graphml(self) -> str:
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
            '<key id="value" for="edge" attr.name="value" attr.type="double"/>',
            '<key id="dataset" for="node" attr.name="dataset" attr.type="string"/>',
            '<graph edgedefault="undirected">',
        ]
        for n in self.nodes:
            lines.append(f'<node id="{escape(n.manuscript_id)}"><data key="dataset">{escape(n.dataset)}</data></node>')
        for e in self.edges:
            lines.append(
                f'<edge source="{escape(e.u)}" target="{escape(e.v)}"><data key="value">{e.value!r}</data></edge>'
            )
        lines += ["</graph>", "</graphml>"]
        return "\n".join(lines)


def build_label_vectors(corpus: Corpus) -> VectorSpace:
    """Per-label vectors composed from the word space (labels whose tokens
    are all out of vocabulary are absent)."""
    word_space = corpus.spaces["word"]
    entries = {}
    for term in corpus.labels.values():
        try:
            entries[term.id] = term_vector(term, word_space)
        except NoVector:
            continue
    return VectorSpace("label", word_space.dim, entries)


def manuscript_mean_vector(
    manuscript: Manuscript,
    metric: str,
    corpus: Corpus,
    label_vectors: Optional[VectorSpace] = None,
) -> np.ndarray:
    """Mean vector of a manuscript under one metric.

    image: mean of its images' embedding vectors.
    label: mean of the word vectors of every (image, label) assignment.
    description: mean of its images' description embeddings.
    Images lacking the relevant field are skipped.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    vecs: list[np.ndarray] = []
    if metric == "image":
        space = corpus.spaces["image"]
        for img_id in manuscript.image_ids:
            v = space.get(img_id)
            if v is not None:
                vecs.append(v)
    elif metric == "description":
        space = corpus.spaces["description"]
        for img_id in manuscript.image_ids:
            v = space.get(img_id)
            if v is not None:
                vecs.append(v)
    else:
        if label_vectors is None:
            label_vectors = build_label_vectors(corpus)
        for img_id in manuscript.image_ids:
            image = corpus.images[img_id]
            for label_id in sorted(image.label_ids):
                v = label_vectors.get(label_id)
                if v is not None:
                    vecs.append(v)
    if not vecs:
        raise NoVector(f"manuscript {manuscript.id!r} contributes nothing under metric {metric!r}")
    return np.mean(vecs, axis=0)


def manuscript_similarity(
    m1: Manuscript,
    m2: Manuscript,
    metric: str,
    corpus: Corpus,
    label_vectors: Optional[VectorSpace] = None,
) -> float:
    """Similarity in (0, 1]: 1 / (1 + Euclidean distance of mean vectors)."""
    v1 = manuscript_mean_vector(m1, metric, corpus, label_vectors)
    v2 = manuscript_mean_vector(m2, metric, corpus, label_vectors)
    return 1.0 / (1.0 + float(np.linalg.norm(v1 - v2)))


def combine_metrics(values: dict[str, float]) -> float:
    """Arithmetic mean of the metrics that were computable."""
    if not values:
        raise ValueError("no metric values to combine")
    return sum(values.values()) / len(values)


def build_graph(
    corpus: Corpus,
    metrics: Iterable[str],
    max_degree: int,
    threshold: float,
) -> ManuscriptGraph:
    """All-pairs combined similarity, threshold filter, then mutual top-k.

    Threshold is applied first; the degree cap keeps, per node, its
    max_degree strongest remaining edges, and an edge survives only if
    both endpoints keep it. Ties are broken by lexicographic pair id.
    """
    metrics = tuple(sorted(set(metrics)))
    if not metrics or any(m not in METRICS for m in metrics):
        raise ValueError(f"metrics must be a non-empty subset of {METRICS}")
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")

    label_vectors = build_label_vectors(corpus) if "label" in metrics else None
    ms_ids = sorted(corpus.manuscripts)
    mean_vecs: dict[str, dict[str, np.ndarray]] = {m: {} for m in metrics}
    for metric in metrics:
        for ms_id in ms_ids:
            try:
                mean_vecs[metric][ms_id] = manuscript_mean_vector(
                    corpus.manuscripts[ms_id], metric, corpus, label_vectors
                )
            except NoVector:
                continue

    candidates: list[GraphEdge] = []
    for i, u in enumerate(ms_ids):
        for v in ms_ids[i + 1 :]:
            values = {}
            for metric in metrics:
                vu, vv = mean_vecs[metric].get(u), mean_vecs[metric].get(v)
                if vu is None or vv is None:
                    continue
                values[metric] = 1.0 / (1.0 + float(np.linalg.norm(vu - vv)))
            if not values:
                continue
            combined = combine_metrics(values)
            if combined >= threshold:
                candidates.append(GraphEdge(u, v, combined))

    # mutual top-k by (value desc, pair lexicographic)
    incident: dict[str, list[GraphEdge]] = {m: [] for m in ms_ids}
    for e in candidates:
        incident[e.u].append(e)
        incident[e.v].append(e)
    kept_by: dict[str, set[tuple[str, str]]] = {}
    for ms_id, edges in incident.items():
        ranked = sorted(edges, key=lambda e: (-e.value, (e.u, e.v)))
        kept_by[ms_id] = {(e.u, e.v) for e in ranked[:max_degree]}
    edges = [e for e in candidates if (e.u, e.v) in kept_by[e.u] and (e.u, e.v) in kept_by[e.v]]
    edges.sort(key=lambda e: (e.u, e.v))

    nodes = [
        GraphNode(manuscript_id=m, dataset=corpus.manuscripts[m].dataset, image_count=len(corpus.manuscripts[m].image_ids))
        for m in ms_ids
    ]
    return ManuscriptGraph(nodes=nodes, edges=edges, metrics=metrics, max_degree=max_degree, threshold=threshold)


def overlay_values(graph: ManuscriptGraph, corpus: Corpus, metric: str) -> dict[tuple[str, str], Optional[float]]:
    """Second per-edge value for an extra metric, computed on demand over
    the existing edge set; None where the metric is uncomputable."""
    label_vectors = build_label_vectors(corpus) if metric == "label" else None
    out: dict[tuple[str, str], Optional[float]] = {}
    for e in graph.edges:
        try:
            out[(e.u, e.v)] = manuscript_similarity(
                corpus.manuscripts[e.u], corpus.manuscripts[e.v], metric, corpus, label_vectors
            )
        except NoVector:
            out[(e.u, e.v)] = None
    return out


@dataclass
class SelectionSummary:
    image_counts: dict[str, int]
    decade_histogram: dict[int, int]
    label_frequencies: list[tuple[str, int]]

    def to_json(self) -> dict:
        return {
            "image_counts": self.image_counts,
            "decade_histogram": {str(k): v for k, v in sorted(self.decade_histogram.items())},
            "label_frequencies": [{"label_id": l, "count": c} for l, c in self.label_frequencies],
        }


def selection_summary(manuscript_ids: Iterable[str], corpus: Corpus) -> SelectionSummary:
    """Metadata summary of a lasso selection: per-manuscript image counts,
    decade histogram of date ranges, label cloud counts (descending)."""
    ids = sorted(set(manuscript_ids))
    if not ids:
        raise EmptySelection("no manuscripts selected")
    unknown = [m for m in ids if m not in corpus.manuscripts]
    if unknown:
        raise EmptySelection(f"unknown manuscripts: {', '.join(unknown)}")

    image_counts = {m: len(corpus.manuscripts[m].image_ids) for m in ids}

    decades: dict[int, int] = {}
    for m in ids:
        date_range = corpus.manuscripts[m].date_range
        if date_range is None:
            continue
        start, end = date_range
        for decade in range((start // 10) * 10, (end // 10) * 10 + 1, 10):
            decades[decade] = decades.get(decade, 0) + 1

    label_counts: dict[str, int] = {}
    for m in ids:
        for img_id in corpus.manuscripts[m].image_ids:
            for label_id in corpus.images[img_id].label_ids:
                label_counts[label_id] = label_counts.get(label_id, 0) + 1
    frequencies = sorted(label_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return SelectionSummary(image_counts=image_counts, decade_histogram=decades, label_frequencies=frequencies)
