"""2D projections of image sets from selectable embedding bases.

A projection request names an image set, a basis (any combination of
image / label / description vectors; blocks are z-normalized and
concatenated), and a seed. Results are immutable snapshots supporting
subset re-projection with recorded lineage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .corpus import Corpus
from .embedding2d import embed_2d
from .errors import EmptyInput, NotASubset, UnknownSnapshot
from .simgraph import build_label_vectors
from .snapshots import SnapshotStore
from .vecspace import VectorSpace

BASES = ("image", "label", "description")


@dataclass
class Projection:
    snapshot_id: str
    basis: tuple[str, ...]
    seed: int
    coords: dict[str, tuple[float, float]]
    created_at: str
    skipped: list[str]
    parent_id: Optional[str] = None

    def to_payload(self) -> dict:
        return {
            "seed": self.seed,
            "coords": {k: [v[0], v[1]] for k, v in self.coords.items()},
            "skipped": list(self.skipped),
        }


def _image_basis_vector(img_id: str, kind: str, corpus: Corpus, label_vectors: VectorSpace) -> Optional[np.ndarray]:
    if kind == "label":
        image = corpus.images[img_id]
        vecs = [label_vectors.get(l) for l in sorted(image.label_ids)]
        vecs = [v for v in vecs if v is not None]
        return np.mean(vecs, axis=0) if vecs else None
    return corpus.spaces[kind].get(img_id)


def basis_matrix(
    image_ids: list[str],
    basis: tuple[str, ...],
    corpus: Corpus,
) -> tuple[list[str], np.ndarray, list[str]]:
    """Assemble the stacked basis matrix.

    Returns (kept image ids, matrix, skipped image ids). An image is kept
    only if it has a vector under every requested basis; each basis block
    is z-normalized per dimension before concatenation so no single space
    dominates the combination.
    """
    label_vectors = build_label_vectors(corpus) if "label" in basis else None
    per_image: dict[str, list[np.ndarray]] = {}
    skipped: list[str] = []
    for img_id in image_ids:
        blocks = []
        for kind in basis:
            v = _image_basis_vector(img_id, kind, corpus, label_vectors)
            if v is None:
                blocks = None
                break
            blocks.append(v)
        if blocks is None:
            skipped.append(img_id)
        else:
            per_image[img_id] = blocks
    kept = [i for i in image_ids if i in per_image]
    if not kept:
        return kept, np.zeros((0, 0)), skipped

    normalized_blocks = []
    for b_idx in range(len(basis)):
        block = np.asarray([per_image[i][b_idx] for i in kept], dtype=np.float64)
        mean = block.mean(axis=0, keepdims=True)
        std = block.std(axis=0, keepdims=True)
        std[std == 0.0] = 1.0
        normalized_blocks.append((block - mean) / std)
    return kept, np.hstack(normalized_blocks), skipped


def project_2d(
    image_ids: Iterable[str],
    basis: Iterable[str],
    seed: int,
    corpus: Corpus,
    store: SnapshotStore,
    user: Optional[str] = None,
    parent_id: Optional[str] = None,
) -> Projection:
    """Compute a deterministic 2D projection and register it as a snapshot."""
    image_ids = list(dict.fromkeys(image_ids))  # preserve order, drop repeats
    basis = tuple(sorted(set(basis)))
    if not basis or any(b not in BASES for b in basis):
        raise ValueError(f"basis must be a non-empty subset of {BASES}")
    unknown = [i for i in image_ids if i not in corpus.images]
    if unknown:
        raise EmptyInput(f"unknown images: {', '.join(unknown[:5])}")
    if not image_ids:
        raise EmptyInput("no images requested")

    kept, matrix, skipped = basis_matrix(image_ids, basis, corpus)
    if not kept:
        raise EmptyInput("no requested image has a vector under the basis")

    coords2d = embed_2d(matrix, seed=seed)
    coords = {img_id: (float(x), float(y)) for img_id, (x, y) in zip(kept, coords2d)}

    projection = Projection(
        snapshot_id="",
        basis=basis,
        seed=seed,
        coords=coords,
        created_at="",
        skipped=skipped,
        parent_id=parent_id,
    )
    descriptor = store.add("projection", projection.to_payload(), user=user, basis=basis, parent_id=parent_id)
    projection.snapshot_id = descriptor.snapshot_id
    projection.created_at = descriptor.created_at
    return projection


def reproject_subset(
    snapshot_id: str,
    image_ids: Iterable[str],
    seed: int,
    corpus: Corpus,
    store: SnapshotStore,
    user: Optional[str] = None,
) -> Projection:
    """Fresh projection of a subset of an existing snapshot's images."""
    snapshot = store.get(snapshot_id)
    if snapshot.descriptor.kind != "projection":
        raise UnknownSnapshot(f"{snapshot_id} is not a projection snapshot")
    parent_images = set(snapshot.payload["coords"])
    subset = list(dict.fromkeys(image_ids))
    outside = [i for i in subset if i not in parent_images]
    if outside:
        raise NotASubset(f"not in parent snapshot: {', '.join(outside[:5])}")
    return project_2d(
        subset,
        snapshot.descriptor.basis,
        seed,
        corpus,
        store,
        user=user,
        parent_id=snapshot_id,
    )


def list_snapshots(
    store: SnapshotStore,
    kind: Optional[str] = None,
    basis: Optional[set[str]] = None,
    user: Optional[str] = None,
):
    return store.list(kind=kind, basis=basis, user=user)
