#!/usr/bin/env python3
"""Build the shipped end-state hierarchy fixture.

Produces a deterministic three-level hierarchy of 842 terms (theme roots,
sub-groups, leaf vocabulary) under fixtures/hierarchy_842.json, mirroring
the scale a finished annotation campaign reaches. Re-running always
yields the same bytes.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scriptorium.fixture import THEMES  # noqa: E402

TOTAL_TERMS = 842
TIMESTAMP = "2024-06-01T00:00:00Z"
USERS = ["estelle", "david"]


def main() -> int:
    rng = random.Random(842)
    nodes: list[dict] = []
    edges: list[dict] = []

    def add_node(node_id: str, is_new: bool) -> None:
        nodes.append({"id": node_id, "is_new": is_new})

    def add_edge(parent: str, child: str) -> None:
        edges.append(
            {"parent": parent, "child": child, "user": rng.choice(USERS), "created_at": TIMESTAMP}
        )

    for theme, surfaces in THEMES.items():
        root = theme
        add_node(root, True)  # abstract roots were created during annotation
        for surface in surfaces:
            child = surface.replace(" ", "-")
            if child == root:
                child = f"{child}-terme"
            add_node(child, False)
            add_edge(root, child)

    themes = list(THEMES)
    group_of_theme: dict[str, list[str]] = {t: [] for t in themes}
    counter = 0
    while len(nodes) < TOTAL_TERMS:
        theme = themes[counter % len(themes)]
        round_for_theme = counter // len(themes)
        if round_for_theme % 8 == 0:
            # open a new sub-group under the theme root (or nest one level
            # deeper once a few groups exist)
            parent = theme if len(group_of_theme[theme]) < 3 else rng.choice(group_of_theme[theme])
            group = f"{theme}-groupe-{round_for_theme // 8:03d}"
            add_node(group, True)
            add_edge(parent, group)
            group_of_theme[theme].append(group)
        else:
            parent = rng.choice(group_of_theme[theme]) if group_of_theme[theme] else theme
            leaf = f"{theme}-terme-{counter:04d}"
            add_node(leaf, False)
            add_edge(parent, leaf)
        counter += 1

    # a few cross-theme assertions, as real campaigns produce
    leaves = [n["id"] for n in nodes if not n["is_new"]]
    roots = set(themes)
    for _ in range(10):
        parent = rng.choice(sorted(n["id"] for n in nodes if n["is_new"] and n["id"] not in roots))
        child = rng.choice(leaves)
        if parent != child and not any(e["parent"] == parent and e["child"] == child for e in edges):
            add_edge(parent, child)

    out = Path(__file__).resolve().parents[1] / "fixtures" / "hierarchy_842.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    doc = {"version": len(edges), "nodes": nodes, "edges": edges}
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=None, separators=(",", ":"))
        fh.write("\n")
    print(f"{out} ({len(nodes)} terms, {len(edges)} edges)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
