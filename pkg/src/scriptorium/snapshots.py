"""Append-only registry of versioned computation results.

Projections, graph rebuilds, and retrofitted spaces all land here as
immutable snapshots: one JSON document per snapshot on disk, a monotone
integer version, and filterable descriptors. The history slider in the
client scrubs these versions.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import UnknownSnapshot

SNAPSHOT_KINDS = ("projection", "graph", "retrofit")


@dataclass(frozen=True)
class SnapshotDescriptor:
    snapshot_id: str
    kind: str
    version: int
    created_at: str
    user: Optional[str] = None
    basis: tuple[str, ...] = ()
    parent_id: Optional[str] = None


@dataclass
class Snapshot:
    descriptor: SnapshotDescriptor
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = self.descriptor
        return {
            "snapshot_id": d.snapshot_id,
            "kind": d.kind,
            "version": d.version,
            "created_at": d.created_at,
            "user": d.user,
            "basis": list(d.basis),
            "parent_id": d.parent_id,
            "payload": self.payload,
        }


class SnapshotStore:
    """Thread-safe, append-only store; snapshots are never rewritten."""

    def __init__(self, directory: Optional[str | Path] = None):
        self._dir = Path(directory) if directory else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._snapshots: dict[str, Snapshot] = {}
        self._order: list[str] = []
        self._next_version = 1

    def add(
        self,
        kind: str,
        payload: dict,
        user: Optional[str] = None,
        basis: tuple[str, ...] = (),
        parent_id: Optional[str] = None,
    ) -> SnapshotDescriptor:
        if kind not in SNAPSHOT_KINDS:
            raise ValueError(f"unknown snapshot kind {kind!r}")
        with self._lock:
            version = self._next_version
            self._next_version += 1
            descriptor = SnapshotDescriptor(
                snapshot_id=f"snap-{version:06d}",
                kind=kind,
                version=version,
                created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                user=user,
                basis=tuple(sorted(basis)),
                parent_id=parent_id,
            )
            snapshot = Snapshot(descriptor=descriptor, payload=payload)
            self._snapshots[descriptor.snapshot_id] = snapshot
            self._order.append(descriptor.snapshot_id)
            if self._dir:
                path = self._dir / f"{descriptor.snapshot_id}.json"
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(snapshot.to_json(), fh, ensure_ascii=False)
            return descriptor

    def get(self, snapshot_id: str) -> Snapshot:
        with self._lock:
            if snapshot_id not in self._snapshots:
                raise UnknownSnapshot(snapshot_id)
            return self._snapshots[snapshot_id]

    def __contains__(self, snapshot_id: str) -> bool:
        with self._lock:
            return snapshot_id in self._snapshots

    def list(
        self,
        kind: Optional[str] = None,
        basis: Optional[set[str]] = None,
        user: Optional[str] = None,
    ) -> list[SnapshotDescriptor]:
        """Descriptors in creation order, optionally filtered."""
        with self._lock:
            out = []
            for sid in self._order:
                d = self._snapshots[sid].descriptor
                if kind and d.kind != kind:
                    continue
                if basis is not None and set(d.basis) != set(basis):
                    continue
                if user and d.user != user:
                    continue
                out.append(d)
            return out
