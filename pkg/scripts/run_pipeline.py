#!/usr/bin/env python3
"""End-to-end pipeline demo against the in-process API.

Generates a synthetic corpus, serves it, and walks the full loop a user
session takes: manuscript graph, point cloud projection, the three
recommendation panels, hierarchy edits, and the retrofit that feeds the
adjusted space back into the word-space view. Prints per-stage timings.

Usage: python scripts/run_pipeline.py [--seed N] [--images N] [--labels N]
"""

from __future__ import annotations

import argparse
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from scriptorium.corpus import load_corpus  # noqa: E402
from scriptorium.engine import Workspace  # noqa: E402
from scriptorium.fixture import generate_fixture  # noqa: E402
from scriptorium.service import create_app  # noqa: E402


def stage(name, started):
    print(f"  {name:<42s} {time.monotonic() - started:6.2f}s")
    return time.monotonic()


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--manuscripts", type=int, default=12)
    parser.add_argument("--images", type=int, default=300)
    parser.add_argument("--labels", type=int, default=120)
    parser.add_argument("--dim", type=int, default=16)
    args = parser.parse_args()

    t0 = time.monotonic()
    with tempfile.TemporaryDirectory() as tmp:
        manifest = generate_fixture(
            args.seed, args.manuscripts, args.images, args.labels, args.dim, Path(tmp) / "data"
        )
        t = stage("fixture generated", t0)

        workspace = Workspace(load_corpus(manifest), data_dir=Path(tmp) / "state")
        app = create_app(workspace, debounce_ms=100)
        with TestClient(app) as client:
            t = stage("corpus ingested + service up", t)

            summary = client.get("/corpus/summary").json()["summary"]
            print(f"    {summary['manuscripts']} manuscripts, {summary['images']} images, "
                  f"{summary['labels']} labels ({summary['labels_by_origin']['both']} shared)")

            graph = client.get("/graph", params={"metrics": "image,label", "max_degree": 4, "threshold": 0.05}).json()
            print(f"    graph: {len(graph['nodes'])} nodes, {len(graph['edges'])} edges")
            t = stage("manuscript graph", t)

            images = sorted(workspace.corpus.images)
            job_id = client.post(
                "/projections", json={"image_ids": images, "basis": ["image"], "seed": args.seed}
            ).json()["job_id"]
            while client.get(f"/jobs/{job_id}").json()["state"] not in ("done", "failed"):
                time.sleep(0.05)
            job = client.get(f"/jobs/{job_id}").json()
            assert job["state"] == "done", job
            coords = client.get(f"/projections/{job['output_snapshot_id']}").json()["payload"]["coords"]
            print(f"    projected {len(coords)} images")
            t = stage("point cloud projection", t)

            labeled = next(i for i in images if workspace.corpus.images[i].label_ids)
            label = sorted(workspace.corpus.images[labeled].label_ids)[0]
            words = client.post("/recs/word-space", json={"selected": [label], "k": 10}).json()
            cooc = client.post("/recs/cooccurrence", json={"selected": [label], "limit": 10}).json()
            neighbors = client.post(
                "/recs/image-neighbors", json={"image_ids": [labeled], "k_images": 8, "limit": 10}
            ).json()
            print(f"    recommendations: {len(words['recommendations'])} word-space, "
                  f"{len(cooc['recommendations'])} co-occurrence, {len(neighbors['recommendations'])} neighbor")
            t = stage("recommendation panels", t)

            vocab = sorted(workspace.label_space.keys())
            parent, child = vocab[0], vocab[1]
            client.post("/hierarchy/nodes", json={"node_id": parent, "user": "demo"})
            client.post("/hierarchy/nodes", json={"node_id": child, "user": "demo"})
            client.post("/hierarchy/edges", json={"parent": parent, "child": child, "user": "demo"})
            layout = client.get("/hierarchy/layout").json()
            print(f"    hierarchy layout over {len(layout['layers'])} nodes")
            t = stage("hierarchy edit + layout", t)

            assert app.state.scheduler.wait_idle(60)
            retro = client.get("/snapshots", params={"kind": "retrofit"}).json()["snapshots"]
            assert retro and workspace.retro_space is not None
            after = client.post("/recs/word-space", json={"selected": [parent], "k": 10}).json()
            print(f"    retrofit space {workspace.retro_space.name}; "
                  f"{len(after['recommendations'])} union-space recommendations")
            t = stage("retrofit + union query", t)

    print(f"total {time.monotonic() - t0:.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
