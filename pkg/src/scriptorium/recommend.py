"""Label recommendation: co-occurrence counts, word-space neighbors, and
neighbor-image labels.

The co-occurrence matrix is maintained incrementally (+/-1 per label
assignment change) so recommendations reflect edits immediately; tests
hold it against a full rebuild.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .corpus import Corpus
from .errors import EmptySelection, NoVector
from .vecspace import VectorSpace, knn, union_knn


def _ordered(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


@dataclass
class CooccurrenceMatrix:
    pair_counts: dict[tuple[str, str], int] = field(default_factory=dict)
    diagonal: dict[str, int] = field(default_factory=dict)
    diagonal_by_dataset: dict[str, dict[str, int]] = field(default_factory=lambda: {"A": {}, "B": {}})
    version: int = 0

    def count(self, a: str, b: str) -> int:
        if a == b:
            return self.diagonal.get(a, 0)
        return self.pair_counts.get(_ordered(a, b), 0)

    def row(self, label_id: str) -> dict[str, int]:
        """Co-occurrence counts of one label against all others."""
        out = {}
        for (a, b), c in self.pair_counts.items():
            if a == label_id:
                out[b] = c
            elif b == label_id:
                out[a] = c
        return out

    def update(self, label_id: str, other_labels: Iterable[str], dataset: str, delta: int) -> None:
        """Apply one assignment change: the label was added to (delta=+1)
        or removed from (delta=-1) an image carrying other_labels."""
        self.diagonal[label_id] = self.diagonal.get(label_id, 0) + delta
        if self.diagonal[label_id] == 0:
            del self.diagonal[label_id]
        ds = self.diagonal_by_dataset.setdefault(dataset, {})
        ds[label_id] = ds.get(label_id, 0) + delta
        if ds[label_id] == 0:
            del ds[label_id]
        for other in other_labels:
            if other == label_id:
                continue
            key = _ordered(label_id, other)
            self.pair_counts[key] = self.pair_counts.get(key, 0) + delta
            if self.pair_counts[key] == 0:
                del self.pair_counts[key]
        self.version += 1


def build_cooccurrence(corpus: Corpus) -> CooccurrenceMatrix:
    """Full rebuild from the corpus: diagonal(l) counts images carrying l,
    pair (a, b) counts images carrying both."""
    matrix = CooccurrenceMatrix()
    for img in corpus.images.values():
        labels = sorted(img.label_ids)
        for i, a in enumerate(labels):
            matrix.diagonal[a] = matrix.diagonal.get(a, 0) + 1
            ds = matrix.diagonal_by_dataset.setdefault(img.dataset, {})
            ds[a] = ds.get(a, 0) + 1
            for b in labels[i + 1 :]:
                key = _ordered(a, b)
                matrix.pair_counts[key] = matrix.pair_counts.get(key, 0) + 1
    return matrix


@dataclass(frozen=True)
class Recommendation:
    label_id: str
    score: float
    origin: str
    explanation: dict

    def to_json(self) -> dict:
        return {
            "label_id": self.label_id,
            "score": self.score,
            "origin": self.origin,
            "explanation": self.explanation,
        }


def _origin(corpus: Corpus, label_id: str) -> str:
    term = corpus.labels.get(label_id)
    return term.dataset_origin if term else "new"


def word_space_recs(
    selected: list[str],
    k: int,
    corpus: Corpus,
    label_space: VectorSpace,
    retro_space: Optional[VectorSpace] = None,
    full_scan: bool = False,
) -> tuple[list[Recommendation], list[str]]:
    """Nearest labels in the union of original and retrofitted spaces.

    Score is the minimum distance to any selected target; each result
    explains itself with its nearest target. Targets without vectors are
    skipped and reported in the second return value.
    """
    if not selected:
        raise EmptySelection("no labels selected")
    retro = retro_space if retro_space is not None else label_space
    usable = [t for t in selected if t in label_space and t in retro]
    skipped = [t for t in selected if t not in usable]
    if not usable:
        raise NoVector("no selected label has a vector")

    best: dict[str, tuple[float, str, tuple[str, ...]]] = {}
    if full_scan:
        candidates = sorted(set(label_space.keys()) | set(retro.keys()))
        for cand in candidates:
            if cand in selected:
                continue
            for target in usable:
                for space in (label_space, retro):
                    if cand not in space or target not in space:
                        continue
                    d = float(np.linalg.norm(space[cand] - space[target]))
                    if cand not in best or (d, target) < (best[cand][0], best[cand][1]):
                        best[cand] = (d, target, (space.name,))
    else:
        exclude = frozenset(selected)
        for target in usable:
            for res in union_knn(label_space, retro, target, k, exclude=exclude):
                entry = (res.distance, target, res.source_spaces)
                if res.key not in best or (entry[0], entry[1]) < (best[res.key][0], best[res.key][1]):
                    best[res.key] = entry

    recs = [
        Recommendation(
            label_id=key,
            score=dist,
            origin=_origin(corpus, key),
            explanation={"nearest_target": target, "distance": dist, "sources": list(sources)},
        )
        for key, (dist, target, sources) in best.items()
    ]
    recs.sort(key=lambda r: (r.score, r.label_id))
    return recs, skipped


def cooccurrence_recs(
    selected: list[str],
    limit: int,
    matrix: CooccurrenceMatrix,
    corpus: Corpus,
) -> list[Recommendation]:
    """Labels co-occurring with the selection, ordered by total count.

    The per-selected breakdown follows the order of the selected list
    (stacked-bar segments follow annotation-space positions)."""
    if not selected:
        raise EmptySelection("no labels selected")
    totals: dict[str, int] = {}
    for s in selected:
        for other, count in matrix.row(s).items():
            if other in selected:
                continue
            totals[other] = totals.get(other, 0) + count
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:limit]
    return [
        Recommendation(
            label_id=label_id,
            score=float(total),
            origin=_origin(corpus, label_id),
            explanation={"breakdown": [{"selected": s, "count": matrix.count(label_id, s)} for s in selected]},
        )
        for label_id, total in ranked
    ]


def image_neighbor_recs(
    selected_image_ids: list[str],
    k_images: int,
    limit: int,
    corpus: Corpus,
    image_space: VectorSpace,
) -> list[Recommendation]:
    """Labels carried by the nearest neighbor images of the selection,
    scored by how many neighbors carry them (ties: smaller distance)."""
    if not selected_image_ids:
        raise EmptySelection("no images selected")
    exclude = set(selected_image_ids)
    neighbor_dist: dict[str, float] = {}
    any_vector = False
    for img_id in selected_image_ids:
        vec = image_space.get(img_id)
        if vec is None:
            continue
        any_vector = True
        for res in knn(image_space, vec, k_images, exclude=exclude):
            if res.key not in neighbor_dist or res.distance < neighbor_dist[res.key]:
                neighbor_dist[res.key] = res.distance
    if not any_vector:
        raise NoVector("no selected image has a vector")

    label_count: dict[str, int] = {}
    label_best_dist: dict[str, float] = {}
    label_carriers: dict[str, list[str]] = {}
    for neighbor_id, dist in neighbor_dist.items():
        image = corpus.images.get(neighbor_id)
        if image is None:
            continue
        for label_id in image.label_ids:
            label_count[label_id] = label_count.get(label_id, 0) + 1
            if label_id not in label_best_dist or dist < label_best_dist[label_id]:
                label_best_dist[label_id] = dist
            label_carriers.setdefault(label_id, []).append(neighbor_id)

    ranked = sorted(label_count, key=lambda l: (-label_count[l], label_best_dist[l], l))[:limit]
    return [
        Recommendation(
            label_id=label_id,
            score=float(label_count[label_id]),
            origin=_origin(corpus, label_id),
            explanation={
                "neighbor_images": sorted(label_carriers[label_id], key=lambda i: (neighbor_dist[i], i)),
                "min_distance": label_best_dist[label_id],
            },
        )
        for label_id in ranked
    ]


def label_frequencies(label_ids: Iterable[str], corpus: Corpus) -> list[tuple[str, int, int]]:
    """Per-dataset image counts for each label; unknown ids count (0, 0)."""
    wanted = list(label_ids)
    counts = {l: {"A": 0, "B": 0} for l in wanted}
    for img in corpus.images.values():
        for label_id in img.label_ids:
            if label_id in counts:
                counts[label_id][img.dataset] += 1
    return [(l, counts[l]["A"], counts[l]["B"]) for l in wanted]
