"""Named vector spaces with exact Euclidean k-NN.

Spaces are immutable snapshots: retrofitting and label creation build new
spaces instead of mutating. All queries are brute-force exact scans; at
desk scale (tens of thousands of vectors) this is faster than maintaining
an approximate index and keeps results reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import EmptySpace, KeyMissing, NoVector, ParseError


@dataclass(frozen=True)
class NeighborResult:
    key: str
    distance: float
    source_spaces: tuple[str, ...]


class VectorSpace:
    """Fixed-dimension map key -> float64 vector, Euclidean metric."""

    def __init__(self, name: str, dim: int, entries: Mapping[str, Iterable[float]] | None = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.name = name
        self.dim = dim
        self._keys: list[str] = []
        self._matrix = np.empty((0, dim), dtype=np.float64)
        self._index: dict[str, int] = {}
        if entries:
            keys = sorted(entries)
            matrix = np.asarray([entries[k] for k in keys], dtype=np.float64)
            if matrix.shape != (len(keys), dim):
                raise ValueError(f"entries do not all have dimension {dim}")
            if not np.all(np.isfinite(matrix)):
                raise ValueError("vector components must be finite")
            self._keys = keys
            self._matrix = matrix
            self._index = {k: i for i, k in enumerate(keys)}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def keys(self) -> list[str]:
        return list(self._keys)

    def get(self, key: str) -> Optional[np.ndarray]:
        i = self._index.get(key)
        return None if i is None else self._matrix[i].copy()

    def __getitem__(self, key: str) -> np.ndarray:
        if key not in self._index:
            raise KeyMissing(key, self.name)
        return self._matrix[self._index[key]].copy()

    def items(self) -> Iterable[tuple[str, np.ndarray]]:
        for k in self._keys:
            yield k, self._matrix[self._index[k]].copy()


def knn(space: VectorSpace, query: np.ndarray, k: int, exclude: frozenset[str] | set[str] = frozenset()) -> list[NeighborResult]:
    """Exact k nearest entries by Euclidean distance, ascending.

    Ties are broken by lexicographic key; k is clamped to the number of
    eligible entries.
    """
    if len(space) == 0:
        raise EmptySpace(f"space {space.name!r} is empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    query = np.asarray(query, dtype=np.float64)
    deltas = space._matrix - query[None, :]
    dists = np.sqrt(np.einsum("ij,ij->i", deltas, deltas))
    # _keys is sorted, so a stable sort on distance breaks ties by key.
    order = np.argsort(dists, kind="stable")
    results: list[NeighborResult] = []
    for i in order:
        key = space._keys[i]
        if key in exclude:
            continue
        results.append(NeighborResult(key=key, distance=float(dists[i]), source_spaces=(space.name,)))
        if len(results) == k:
            break
    return results


def union_knn(
    space_orig: VectorSpace,
    space_retro: VectorSpace,
    query_key: str,
    k: int,
    exclude: frozenset[str] | set[str] = frozenset(),
) -> list[NeighborResult]:
    """Deduplicated union of the k-NN sets of both spaces for one key.

    Each result is tagged with the spaces that produced it and scored by
    the minimum of its per-space distances. The optional exclusion set is
    applied inside each per-space query (callers exclude e.g. the
    currently selected labels)."""
    for space in (space_orig, space_retro):
        if query_key not in space:
            raise KeyMissing(query_key, space.name)
    merged: dict[str, tuple[float, set[str]]] = {}
    for space in (space_orig, space_retro):
        for res in knn(space, space[query_key], k, exclude=exclude):
            if res.key in merged:
                best, sources = merged[res.key]
                merged[res.key] = (min(best, res.distance), sources | set(res.source_spaces))
            else:
                merged[res.key] = (res.distance, set(res.source_spaces))
    out = [
        NeighborResult(key=key, distance=dist, source_spaces=tuple(sorted(sources)))
        for key, (dist, sources) in merged.items()
    ]
    out.sort(key=lambda r: (r.distance, r.key))
    return out


def term_vector(term, word_space: VectorSpace) -> np.ndarray:
    """Vector for a label term: mean of its in-vocabulary token vectors."""
    vecs = [word_space.get(tok) for tok in term.tokens]
    vecs = [v for v in vecs if v is not None]
    if not vecs:
        raise NoVector(f"no token of {term.normalized!r} is in space {word_space.name!r}")
    return np.mean(vecs, axis=0)


def mean_vector(keys: Iterable[str], space: VectorSpace) -> tuple[np.ndarray, int]:
    """Arithmetic mean over resolvable keys; returns (vector, skipped count)."""
    vecs = []
    skipped = 0
    for key in keys:
        v = space.get(key)
        if v is None:
            skipped += 1
        else:
            vecs.append(v)
    if not vecs:
        raise NoVector(f"none of the keys resolve in space {space.name!r}")
    return np.mean(vecs, axis=0), skipped


def read_vector_file(path: str | Path, name: str) -> VectorSpace:
    """Parse the 'N D' header vector text format into a space."""
    path = Path(path)
    entries: dict[str, list[float]] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(str(path), 1, "expected header 'N D'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ParseError(str(path), 1, "expected integer header 'N D'") from exc
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise ParseError(str(path), lineno, f"expected key plus {dim} components, got {len(parts) - 1}")
            key = parts[0]
            if key in entries:
                raise ParseError(str(path), lineno, f"duplicate key {key!r}")
            try:
                entries[key] = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise ParseError(str(path), lineno, "non-numeric component") from exc
    if len(entries) != count:
        raise ParseError(str(path), 1, f"header claims {count} entries, file has {len(entries)}")
    return VectorSpace(name, dim, entries)


def write_vector_file(space: VectorSpace, path: str | Path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for key, vec in space.items():
            fh.write(key + " " + " ".join(repr(float(x)) for x in vec) + "\n")
