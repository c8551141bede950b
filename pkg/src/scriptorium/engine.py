"""Workspace: the one object wiring corpus, spaces, annotation state,
snapshots, and derived vector spaces together for the service layer."""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from .annotation import AnnotationStore, load_log, replay
from .corpus import Corpus, load_corpus
from .errors import NoVector
from .hierarchy import LabelHierarchy
from .retrofit import RetrofitParams, RetrofitResult, retrofit
from .simgraph import build_label_vectors
from .snapshots import SnapshotStore
from .vecspace import VectorSpace, write_vector_file


class Workspace:
    def __init__(self, corpus: Corpus, data_dir: Optional[str | Path] = None):
        self.data_dir = Path(data_dir) if data_dir else None
        snapshot_dir = self.data_dir / "snapshots" if self.data_dir else None
        log_path = self.data_dir / "history.ndjson" if self.data_dir else None

        if log_path and log_path.exists():
            # restore prior sessions, then keep appending to the same log
            entries = load_log(log_path)
            rebuilt = replay(entries, corpus)
            corpus = rebuilt.corpus
            hierarchy = rebuilt.hierarchy
            self.store = AnnotationStore(corpus, hierarchy=hierarchy, log_path=log_path)
            self.store.history = rebuilt.history
            self.store.matrix = rebuilt.matrix
        else:
            self.store = AnnotationStore(corpus, log_path=log_path)

        self.corpus = self.store.corpus
        self.hierarchy: LabelHierarchy = self.store.hierarchy
        self.snapshots = SnapshotStore(snapshot_dir)
        self.retro_space: Optional[VectorSpace] = None

        self._lock = threading.RLock()
        self._label_space: Optional[VectorSpace] = None
        self._label_space_count = -1

    @classmethod
    def from_manifest(cls, manifest_path: str | Path, data_dir: Optional[str | Path] = None) -> "Workspace":
        return cls(load_corpus(manifest_path), data_dir=data_dir)

    @property
    def label_space(self) -> VectorSpace:
        """Per-label vectors composed from the word space; rebuilt when the
        vocabulary grows."""
        with self._lock:
            if self._label_space is None or len(self.corpus.labels) != self._label_space_count:
                self._label_space = build_label_vectors(self.corpus)
                self._label_space_count = len(self.corpus.labels)
            return self._label_space

    def run_retrofit(self, params: Optional[RetrofitParams] = None) -> RetrofitResult:
        """Produce (and persist) the hierarchy-adjusted label space."""
        with self._lock:
            hierarchy = self.hierarchy.clone()
            label_space = self.label_space
        if len(label_space) == 0:
            raise NoVector("label space is empty; nothing to retrofit")
        result = retrofit(label_space, hierarchy, params)
        with self._lock:
            self.retro_space = result.space
        if self.data_dir:
            space_dir = self.data_dir / "spaces"
            space_dir.mkdir(parents=True, exist_ok=True)
            write_vector_file(result.space, space_dir / f"{result.space.name}.txt")
        return result

    def close(self) -> None:
        self.store.close()
