"""The user-built label hierarchy: a versioned directed graph over label
ids with per-edge user attribution, plus its layered layout and the
visibility rule tying it to the current image selection."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .corpus import Corpus
from .errors import DuplicateEdge, SelfLoop, UnknownEdge, UnknownNode
from .sugiyama import Edge, LayoutParams, LayoutResult, detect_cycles, layered_layout


@dataclass(frozen=True)
class AddNode:
    node_id: str
    is_new: bool = False


@dataclass(frozen=True)
class AddEdge:
    parent: str
    child: str


@dataclass(frozen=True)
class RemoveEdge:
    parent: str
    child: str


HierarchyChange = Union[AddNode, AddEdge, RemoveEdge]


@dataclass
class EdgeInfo:
    user: str
    created_at: str


@dataclass
class LabelHierarchy:
    nodes: dict[str, bool] = field(default_factory=dict)  # node id -> is_new
    edges: dict[Edge, EdgeInfo] = field(default_factory=dict)
    version: int = 0

    def apply(self, change: HierarchyChange, user: str, timestamp: str) -> int:
        """Validate and apply one mutation; returns the new version."""
        if isinstance(change, AddNode):
            if change.node_id not in self.nodes:
                self.nodes[change.node_id] = change.is_new
        elif isinstance(change, AddEdge):
            if change.parent == change.child:
                raise SelfLoop(f"{change.parent} -> itself")
            for endpoint in (change.parent, change.child):
                if endpoint not in self.nodes:
                    raise UnknownNode(endpoint)
            key = (change.parent, change.child)
            if key in self.edges:
                raise DuplicateEdge(f"{change.parent} -> {change.child}")
            self.edges[key] = EdgeInfo(user=user, created_at=timestamp)
        elif isinstance(change, RemoveEdge):
            key = (change.parent, change.child)
            if key not in self.edges:
                raise UnknownEdge(f"{change.parent} -> {change.child}")
            del self.edges[key]
        else:
            raise TypeError(f"unknown change {change!r}")
        self.version += 1
        return self.version

    def edge_set(self) -> set[Edge]:
        return set(self.edges)

    def back_edges(self) -> set[Edge]:
        _, back = detect_cycles(set(self.nodes), self.edge_set())
        return back

    def layout(self, params: Optional[LayoutParams] = None) -> LayoutResult:
        return layered_layout(set(self.nodes), self.edge_set(), params)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "nodes": [{"id": n, "is_new": self.nodes[n]} for n in sorted(self.nodes)],
            "edges": [
                {"parent": u, "child": v, "user": info.user, "created_at": info.created_at}
                for (u, v), info in sorted(self.edges.items())
            ],
        }

    def clone(self) -> "LabelHierarchy":
        return LabelHierarchy(
            nodes=dict(self.nodes),
            edges={k: EdgeInfo(user=i.user, created_at=i.created_at) for k, i in self.edges.items()},
            version=self.version,
        )


def hierarchy_from_json(doc: dict) -> LabelHierarchy:
    h = LabelHierarchy()
    for node in doc.get("nodes", []):
        h.nodes[node["id"]] = bool(node.get("is_new", False))
    for edge in doc.get("edges", []):
        key = (edge["parent"], edge["child"])
        if edge["parent"] not in h.nodes or edge["child"] not in h.nodes:
            raise UnknownNode(f"edge {key} references a missing node")
        h.edges[key] = EdgeInfo(user=edge.get("user", "import"), created_at=edge.get("created_at", ""))
    h.version = int(doc.get("version", 0))
    return h


def load_hierarchy(path: str | Path) -> LabelHierarchy:
    with open(path, encoding="utf-8") as fh:
        return hierarchy_from_json(json.load(fh))


def save_hierarchy(hierarchy: LabelHierarchy, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hierarchy.to_json(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def visible_subgraph(
    hierarchy: LabelHierarchy,
    selected_image_ids: Iterable[str],
    corpus: Corpus,
) -> tuple[set[str], set[Edge]]:
    """Hierarchy nodes for the current selection: labels carried by the
    selected images plus all their ancestors and descendants over
    forward (non-back) edges, with the induced edges."""
    selected_labels: set[str] = set()
    for img_id in selected_image_ids:
        image = corpus.images.get(img_id)
        if image:
            selected_labels |= image.label_ids & set(hierarchy.nodes)
    if not selected_labels:
        return set(), set()

    forward, _ = detect_cycles(set(hierarchy.nodes), hierarchy.edge_set())
    parents: dict[str, set[str]] = {}
    children: dict[str, set[str]] = {}
    for u, v in forward:
        children.setdefault(u, set()).add(v)
        parents.setdefault(v, set()).add(u)

    visible = set(selected_labels)
    for neighbor_map in (parents, children):
        reached = set(selected_labels)
        frontier = list(selected_labels)
        while frontier:
            node = frontier.pop()
            for other in neighbor_map.get(node, ()):
                if other not in reached:
                    reached.add(other)
                    frontier.append(other)
        visible |= reached

    induced = {(u, v) for (u, v) in hierarchy.edges if u in visible and v in visible}
    return visible, induced
