"""Event-sourced annotation state.

Every mutation (label assignment, label creation, categorization,
hierarchy edit) validates against current state, is recorded as a
history entry, and is then applied through one shared code path, so
replaying the log over a pristine corpus reproduces live state exactly.
The log is the source of truth; corpus assignments, the hierarchy, and
the co-occurrence matrix are projections of it.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional

from .corpus import LABEL_CATEGORIES, Corpus, LabelTerm, normalize_term
from .errors import (
    CorruptLog,
    DuplicateLabel,
    NoOpChange,
    UnknownImage,
    UnknownLabel,
)
from .hierarchy import AddEdge, AddNode, HierarchyChange, LabelHierarchy, RemoveEdge
from .recommend import CooccurrenceMatrix, build_cooccurrence


@dataclass(frozen=True)
class HistoryEntry:
    seq: int
    timestamp: str
    user: str
    change: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "timestamp": self.timestamp, "user": self.user, "change": self.change}

    @classmethod
    def from_json(cls, doc: dict) -> "HistoryEntry":
        return cls(seq=int(doc["seq"]), timestamp=doc["timestamp"], user=doc["user"], change=dict(doc["change"]))


def _utcnow() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class AnnotationStore:
    """Single writer for all annotation and hierarchy mutations."""

    def __init__(
        self,
        corpus: Corpus,
        hierarchy: Optional[LabelHierarchy] = None,
        log_path: Optional[str | Path] = None,
        clock: Optional[Callable[[], str]] = None,
    ):
        self.corpus = corpus
        self.hierarchy = hierarchy or LabelHierarchy()
        self.matrix: CooccurrenceMatrix = build_cooccurrence(corpus)
        self.history: list[HistoryEntry] = []
        self._clock = clock or _utcnow
        self._lock = threading.RLock()
        self._listeners: list[Callable[[HistoryEntry], None]] = []
        self._log_path = Path(log_path) if log_path else None
        if self._log_path:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
        self._log_file = open(self._log_path, "a", encoding="utf-8") if self._log_path else None

    # ------------------------------------------------------------- plumbing

    def subscribe(self, listener: Callable[[HistoryEntry], None]) -> None:
        """Called after each committed entry (service recompute triggers)."""
        self._listeners.append(listener)

    @property
    def seq(self) -> int:
        return self.history[-1].seq if self.history else 0

    def entries_since(self, since_seq: int) -> list[HistoryEntry]:
        return [e for e in self.history if e.seq > since_seq]

    def close(self) -> None:
        if self._log_file:
            self._log_file.flush()
            os.fsync(self._log_file.fileno())
            self._log_file.close()
            self._log_file = None

    def _commit(self, user: str, change: dict) -> HistoryEntry:
        entry = HistoryEntry(seq=self.seq + 1, timestamp=self._clock(), user=user, change=change)
        self._apply(entry)
        self.history.append(entry)
        if self._log_file:
            self._log_file.write(json.dumps(entry.to_json(), ensure_ascii=False) + "\n")
            self._log_file.flush()
        for listener in self._listeners:
            listener(entry)
        return entry

    # ------------------------------------------------------------ mutations

    def set_label(self, image_id: str, label_id: str, present: bool, user: str) -> HistoryEntry:
        """Add or remove one label on one image."""
        if not user:
            raise ValueError("user required")
        with self._lock:
            image = self.corpus.images.get(image_id)
            if image is None:
                raise UnknownImage(image_id)
            if label_id not in self.corpus.labels:
                raise UnknownLabel(label_id)
            if present == (label_id in image.label_ids):
                raise NoOpChange(f"label {label_id} already {'present' if present else 'absent'} on {image_id}")
            return self._commit(user, {"type": "set_label", "image_id": image_id, "label_id": label_id, "present": present})

    def create_label(self, surface: str, user: str) -> tuple[LabelTerm, HistoryEntry]:
        """Register a brand-new vocabulary term (dataset_origin="new")."""
        if not user:
            raise ValueError("user required")
        with self._lock:
            normalized, _ = normalize_term(surface, self.corpus.stopwords)
            for term in self.corpus.labels.values():
                if term.normalized == normalized:
                    raise DuplicateLabel(normalized, term.id)
            label_id = self._new_label_id(normalized)
            entry = self._commit(user, {"type": "create_label", "label_id": label_id, "surface": surface})
            return self.corpus.labels[label_id], entry

    def categorize_label(self, label_id: str, category: str, user: str) -> HistoryEntry:
        if not user:
            raise ValueError("user required")
        if category not in LABEL_CATEGORIES:
            raise ValueError(f"category must be one of {LABEL_CATEGORIES}")
        with self._lock:
            if label_id not in self.corpus.labels:
                raise UnknownLabel(label_id)
            return self._commit(user, {"type": "categorize", "label_id": label_id, "category": category})

    def mutate_hierarchy(self, change: HierarchyChange, user: str) -> HistoryEntry:
        """Route hierarchy edits through the history log."""
        if not user:
            raise ValueError("user required")
        with self._lock:
            # validate against a copy first so failed changes leave no trace
            probe = self.hierarchy.clone()
            probe.apply(change, user, "probe")
            if isinstance(change, AddNode):
                payload = {"type": "hierarchy", "op": "add_node", "node_id": change.node_id, "is_new": change.is_new}
            elif isinstance(change, AddEdge):
                payload = {"type": "hierarchy", "op": "add_edge", "parent": change.parent, "child": change.child}
            else:
                payload = {"type": "hierarchy", "op": "remove_edge", "parent": change.parent, "child": change.child}
            return self._commit(user, payload)

    # ------------------------------------------------------------- applying

    def _new_label_id(self, normalized: str) -> str:
        base = "new-" + normalized.replace(" ", "-")
        label_id = base
        n = 2
        while label_id in self.corpus.labels:
            label_id = f"{base}-{n}"
            n += 1
        return label_id

    def _apply(self, entry: HistoryEntry) -> None:
        change = entry.change
        kind = change["type"]
        if kind == "set_label":
            image = self.corpus.images[change["image_id"]]
            label_id = change["label_id"]
            if change["present"]:
                self.matrix.update(label_id, image.label_ids, image.dataset, +1)
                image.label_ids.add(label_id)
            else:
                image.label_ids.discard(label_id)
                self.matrix.update(label_id, image.label_ids, image.dataset, -1)
        elif kind == "create_label":
            normalized, tokens = normalize_term(change["surface"], self.corpus.stopwords)
            self.corpus.labels[change["label_id"]] = LabelTerm(
                id=change["label_id"],
                surface=change["surface"],
                normalized=normalized,
                tokens=tokens,
                dataset_origin="new",
            )
        elif kind == "categorize":
            self.corpus.labels[change["label_id"]].category = change["category"]
        elif kind == "hierarchy":
            op = change["op"]
            if op == "add_node":
                hierarchy_change: HierarchyChange = AddNode(change["node_id"], change["is_new"])
            elif op == "add_edge":
                hierarchy_change = AddEdge(change["parent"], change["child"])
            else:
                hierarchy_change = RemoveEdge(change["parent"], change["child"])
            self.hierarchy.apply(hierarchy_change, entry.user, entry.timestamp)
        else:
            raise CorruptLog(entry.seq, f"unknown change type {kind!r}")


def replay(entries: Iterable[HistoryEntry], base_corpus: Corpus) -> AnnotationStore:
    """Rebuild state from a log over a pristine corpus.

    The log must be contiguous from seq 1; entries are applied through
    the same code path live mutations use."""
    store = AnnotationStore(base_corpus)
    expected = 1
    for entry in entries:
        if entry.seq != expected:
            raise CorruptLog(entry.seq, f"expected seq {expected}")
        try:
            store._apply(entry)
        except CorruptLog:
            raise
        except Exception as exc:
            raise CorruptLog(entry.seq, f"entry failed to apply: {exc}") from exc
        store.history.append(entry)
        expected += 1
    return store


def load_log(path: str | Path) -> list[HistoryEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(HistoryEntry.from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorruptLog(lineno, f"unreadable log line: {exc}") from exc
    return entries


def state_fingerprint(store: AnnotationStore) -> dict:
    """Canonical snapshot of everything replay must reproduce."""
    return {
        "assignments": {img_id: sorted(img.label_ids) for img_id, img in sorted(store.corpus.images.items())},
        "labels": {
            label_id: {
                "surface": t.surface,
                "normalized": t.normalized,
                "origin": t.dataset_origin,
                "category": t.category,
            }
            for label_id, t in sorted(store.corpus.labels.items())
        },
        "hierarchy_nodes": dict(sorted(store.hierarchy.nodes.items())),
        "hierarchy_edges": {
            f"{u}->{v}": {"user": info.user, "created_at": info.created_at}
            for (u, v), info in sorted(store.hierarchy.edges.items())
        },
        "matrix": {
            "pairs": {f"{a}|{b}": c for (a, b), c in sorted(store.matrix.pair_counts.items())},
            "diagonal": dict(sorted(store.matrix.diagonal.items())),
        },
    }
