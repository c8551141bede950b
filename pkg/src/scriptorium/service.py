"""HTTP/JSON API over one workspace.

All engine capabilities are exposed as JSON routes; mutations flow
through the annotation store (the only write path) and trigger debounced
background recomputation of label-dependent artifacts. Every response
carries the history seq it reflects as data_version.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import errors
from .annotation import HistoryEntry
from .engine import Workspace
from .hierarchy import AddEdge, AddNode, RemoveEdge, visible_subgraph
from .jobs import JobScheduler
from .projection import BASES, project_2d, reproject_subset
from .recommend import cooccurrence_recs, image_neighbor_recs, label_frequencies, word_space_recs
from .simgraph import METRICS, build_graph, overlay_values, selection_summary

NOT_FOUND = (
    errors.UnknownImage,
    errors.UnknownLabel,
    errors.UnknownNode,
    errors.UnknownEdge,
    errors.UnknownSnapshot,
    errors.KeyMissing,
)
CONFLICT = (errors.NoOpChange, errors.DuplicateEdge, errors.DuplicateLabel)

DEFAULT_GRAPH_PARAMS = {"metrics": ("label",), "max_degree": 8, "threshold": 0.0}


def create_app(
    workspace: Workspace,
    debounce_ms: int = 2000,
    workers: int = 2,
    static_dir: Optional[str] = None,
) -> FastAPI:
    scheduler = JobScheduler(workers=workers, debounce_ms=debounce_ms)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        scheduler.shutdown()
        workspace.close()

    app = FastAPI(title="scriptorium", version="0.1.0", lifespan=lifespan)
    app.state.workspace = workspace
    app.state.scheduler = scheduler

    # last explicit requests, re-run by recompute jobs
    state = {
        "projection_request": None,  # (image_ids, basis, seed)
        "graph_params": dict(DEFAULT_GRAPH_PARAMS),
    }

    def versioned(payload: dict, status_code: int = 200) -> JSONResponse:
        payload["data_version"] = workspace.store.seq
        return JSONResponse(payload, status_code=status_code)

    # ----------------------------------------------------------- job bodies

    def projection_job(image_ids, basis, seed, user=None, parent_id=None):
        def work() -> str:
            projection = (
                reproject_subset(parent_id, image_ids, seed, workspace.corpus, workspace.snapshots, user=user)
                if parent_id
                else project_2d(image_ids, basis, seed, workspace.corpus, workspace.snapshots, user=user)
            )
            return projection.snapshot_id

        return work

    def graph_job(params):
        def work() -> str:
            graph = build_graph(workspace.corpus, **params)
            descriptor = workspace.snapshots.add("graph", graph.to_json())
            return descriptor.snapshot_id

        return work

    def retrofit_job():
        def work() -> str:
            result = workspace.run_retrofit()
            descriptor = workspace.snapshots.add(
                "retrofit",
                {
                    "space_name": result.space.name,
                    "entries": len(result.space),
                    "displacements": result.displacements,
                    "skipped": result.skipped,
                },
            )
            return descriptor.snapshot_id

        return work

    def schedule_recompute(entry: HistoryEntry) -> None:
        """Mutation hook: co-occurrence is already updated synchronously in
        the same transaction; label-dependent projections and graphs are
        debounced, hierarchy edits additionally retrofit."""
        version = entry.seq
        request = state["projection_request"]
        if request:
            image_ids, basis, seed = request
        else:
            image_ids, basis, seed = sorted(workspace.corpus.images), ("label",), 0
        scheduler.submit_debounced(
            "projection:label",
            "projection",
            projection_job(image_ids, basis, seed),
            input_version=version,
        )
        graph_params = dict(state["graph_params"])
        if "label" not in graph_params["metrics"]:
            graph_params["metrics"] = tuple(sorted(set(graph_params["metrics"]) | {"label"}))
        scheduler.submit_debounced("graph:label", "graph_similarity", graph_job(graph_params), input_version=version)
        if entry.change["type"] == "hierarchy":
            scheduler.submit_debounced("retrofit", "retrofit", retrofit_job(), input_version=version)

    workspace.store.subscribe(schedule_recompute)

    # --------------------------------------------------------------- errors

    @app.exception_handler(errors.ScriptoriumError)
    async def engine_error(request: Request, exc: errors.ScriptoriumError):
        if isinstance(exc, NOT_FOUND):
            status = 404
        elif isinstance(exc, CONFLICT):
            status = 409
        else:
            status = 400
        payload = {"error": exc.code, "detail": str(exc)}
        if isinstance(exc, errors.DuplicateLabel):
            payload["existing_id"] = exc.existing_id
        payload["data_version"] = workspace.store.seq
        return JSONResponse(payload, status_code=status)

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(
            {"error": "validation", "detail": str(exc), "data_version": workspace.store.seq},
            status_code=400,
        )

    # ---------------------------------------------------------------- reads

    @app.get("/corpus/summary")
    def corpus_summary():
        return versioned({"summary": workspace.corpus.summary()})

    @app.get("/graph")
    def get_graph(
        metrics: str = Query("label"),
        max_degree: int = Query(8),
        threshold: float = Query(0.0),
        overlay: Optional[str] = Query(None),
    ):
        selected = tuple(sorted({m.strip() for m in metrics.split(",") if m.strip()}))
        params = {"metrics": selected, "max_degree": max_degree, "threshold": threshold}
        graph = build_graph(workspace.corpus, **params)
        state["graph_params"] = params
        payload = graph.to_json()
        if overlay:
            if overlay not in METRICS:
                raise ValueError(f"overlay must be one of {METRICS}")
            payload["overlay"] = {
                "metric": overlay,
                "values": [{"u": u, "v": v, "value": value} for (u, v), value in sorted(overlay_values(graph, workspace.corpus, overlay).items())],
            }
        return versioned(payload)

    @app.post("/graph/selection-summary")
    def graph_selection_summary(body: dict = Body(...)):
        summary = selection_summary(body.get("manuscript_ids", []), workspace.corpus)
        return versioned(summary.to_json())

    @app.get("/images")
    def list_images(
        ids: Optional[str] = Query(None),
        manuscript_ids: Optional[str] = Query(None),
        label_id: Optional[str] = Query(None),
    ):
        images = workspace.corpus.images
        if ids is not None:
            wanted = [i for i in ids.split(",") if i]
            missing = [i for i in wanted if i not in images]
            if missing:
                raise errors.UnknownImage(", ".join(missing[:5]))
            selected = [images[i] for i in wanted]
        elif manuscript_ids is not None:
            wanted_ms = {m for m in manuscript_ids.split(",") if m}
            selected = [img for img in images.values() if img.manuscript_id in wanted_ms]
        else:
            selected = list(images.values())
        if label_id is not None:
            selected = [img for img in selected if label_id in img.label_ids]
        selected.sort(key=lambda img: img.id)
        return versioned(
            {
                "images": [
                    {
                        "id": img.id,
                        "manuscript_id": img.manuscript_id,
                        "dataset": img.dataset,
                        "folio": img.folio,
                        "book": img.book,
                        "subject": img.subject,
                        "description": img.description,
                        "label_ids": sorted(img.label_ids),
                        "image_uri": img.image_uri,
                    }
                    for img in selected
                ]
            }
        )

    @app.get("/labels")
    def list_labels():
        labels = [
            {
                "id": t.id,
                "surface": t.surface,
                "normalized": t.normalized,
                "dataset_origin": t.dataset_origin,
                "category": t.category,
            }
            for t in sorted(workspace.corpus.labels.values(), key=lambda t: t.id)
        ]
        return versioned({"labels": labels})

    @app.get("/labels/{label_id}/frequency")
    def label_frequency(label_id: str):
        ((_, count_a, count_b),) = label_frequencies([label_id], workspace.corpus)
        return versioned({"label_id": label_id, "count_a": count_a, "count_b": count_b})

    @app.get("/history")
    def history(since_seq: int = Query(0)):
        entries = [e.to_json() for e in workspace.store.entries_since(since_seq)]
        return versioned({"entries": entries})

    @app.get("/snapshots")
    def snapshots(kind: Optional[str] = Query(None), user: Optional[str] = Query(None)):
        descriptors = workspace.snapshots.list(kind=kind, user=user)
        return versioned(
            {
                "snapshots": [
                    {
                        "snapshot_id": d.snapshot_id,
                        "kind": d.kind,
                        "version": d.version,
                        "created_at": d.created_at,
                        "user": d.user,
                        "basis": list(d.basis),
                        "parent_id": d.parent_id,
                    }
                    for d in descriptors
                ]
            }
        )

    @app.get("/projections/{snapshot_id}")
    def get_projection(snapshot_id: str):
        snapshot = workspace.snapshots.get(snapshot_id)
        if snapshot.descriptor.kind != "projection":
            raise errors.UnknownSnapshot(snapshot_id)
        return versioned(snapshot.to_json())

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        descriptor = app.state.scheduler.get(job_id)
        if descriptor is None:
            raise errors.UnknownSnapshot(f"job {job_id}")
        return versioned(descriptor.to_json())

    # ------------------------------------------------------------ mutations

    @app.post("/annotations")
    def post_annotation(body: dict = Body(...)):
        entry = workspace.store.set_label(
            str(body.get("image_id", "")),
            str(body.get("label_id", "")),
            bool(body.get("present", True)),
            str(body.get("user", "")),
        )
        return versioned({"seq": entry.seq})

    @app.post("/labels")
    def post_label(body: dict = Body(...)):
        term, entry = workspace.store.create_label(str(body.get("surface", "")), str(body.get("user", "")))
        return versioned(
            {
                "label": {
                    "id": term.id,
                    "surface": term.surface,
                    "normalized": term.normalized,
                    "dataset_origin": term.dataset_origin,
                },
                "seq": entry.seq,
            },
            status_code=201,
        )

    @app.post("/labels/{label_id}/category")
    def post_category(label_id: str, body: dict = Body(...)):
        entry = workspace.store.categorize_label(label_id, str(body.get("category", "")), str(body.get("user", "")))
        return versioned({"seq": entry.seq})

    # ---------------------------------------------------------- projections

    @app.post("/projections", status_code=202)
    def post_projection(body: dict = Body(...)):
        image_ids = [str(i) for i in body.get("image_ids", [])]
        basis = tuple(sorted({str(b) for b in body.get("basis", ["image"])}))
        if not basis or any(b not in BASES for b in basis):
            raise ValueError(f"basis must be a non-empty subset of {BASES}")
        seed = int(body.get("seed", 0))
        user = body.get("user")
        parent_id = body.get("parent_id")
        if parent_id and parent_id not in workspace.snapshots:
            raise errors.UnknownSnapshot(parent_id)
        if "label" in basis:
            state["projection_request"] = (image_ids, basis, seed)
        descriptor = app.state.scheduler.submit(
            "projection",
            projection_job(image_ids, basis, seed, user=user, parent_id=parent_id),
            input_version=workspace.store.seq,
        )
        return versioned({"job_id": descriptor.job_id}, status_code=202)

    # ------------------------------------------------------ recommendations

    @app.post("/recs/word-space")
    def recs_word_space(body: dict = Body(...)):
        selected = [str(s) for s in body.get("selected", [])]
        k = int(body.get("k", 20))
        recs, skipped = word_space_recs(
            selected,
            k,
            workspace.corpus,
            workspace.label_space,
            workspace.retro_space,
            full_scan=bool(body.get("full_scan", False)),
        )
        return versioned({"recommendations": [r.to_json() for r in recs], "skipped_targets": skipped})

    @app.post("/recs/cooccurrence")
    def recs_cooccurrence(body: dict = Body(...)):
        selected = [str(s) for s in body.get("selected", [])]
        limit = int(body.get("limit", 30))
        recs = cooccurrence_recs(selected, limit, workspace.store.matrix, workspace.corpus)
        return versioned({"recommendations": [r.to_json() for r in recs]})

    @app.post("/recs/image-neighbors")
    def recs_image_neighbors(body: dict = Body(...)):
        selected = [str(s) for s in body.get("image_ids", [])]
        k_images = int(body.get("k_images", 10))
        limit = int(body.get("limit", 30))
        recs = image_neighbor_recs(selected, k_images, limit, workspace.corpus, workspace.corpus.spaces["image"])
        return versioned({"recommendations": [r.to_json() for r in recs]})

    # -------------------------------------------------------------hierarchy

    @app.get("/hierarchy")
    def get_hierarchy(image_ids: Optional[str] = Query(None)):
        payload = workspace.hierarchy.to_json()
        payload["back_edges"] = sorted([list(e) for e in workspace.hierarchy.back_edges()])
        if image_ids is not None:
            selected = [i for i in image_ids.split(",") if i]
            nodes, edges = visible_subgraph(workspace.hierarchy, selected, workspace.corpus)
            payload["visible"] = {"nodes": sorted(nodes), "edges": sorted([list(e) for e in edges])}
        return versioned(payload)

    @app.post("/hierarchy/nodes", status_code=201)
    def post_hierarchy_node(body: dict = Body(...)):
        node_id = str(body.get("node_id", ""))
        if not node_id:
            raise ValueError("node_id required")
        term = workspace.corpus.labels.get(node_id)
        default_new = term.dataset_origin == "new" if term else True
        is_new = bool(body.get("is_new", default_new))
        entry = workspace.store.mutate_hierarchy(AddNode(node_id, is_new), str(body.get("user", "")))
        return versioned({"seq": entry.seq, "version": workspace.hierarchy.version}, status_code=201)

    @app.post("/hierarchy/edges", status_code=201)
    def post_hierarchy_edge(body: dict = Body(...)):
        entry = workspace.store.mutate_hierarchy(
            AddEdge(str(body.get("parent", "")), str(body.get("child", ""))),
            str(body.get("user", "")),
        )
        return versioned({"seq": entry.seq, "version": workspace.hierarchy.version}, status_code=201)

    @app.delete("/hierarchy/edges")
    def delete_hierarchy_edge(parent: str = Query(...), child: str = Query(...), user: str = Query(...)):
        entry = workspace.store.mutate_hierarchy(RemoveEdge(parent, child), user)
        return versioned({"seq": entry.seq, "version": workspace.hierarchy.version})

    @app.get("/hierarchy/layout")
    def hierarchy_layout():
        result = workspace.hierarchy.layout()
        return versioned(
            {
                "version": workspace.hierarchy.version,
                "layers": result.layers,
                "order": result.order,
                "coords": {n: [x, y] for n, (x, y) in result.coords.items()},
                "back_edges": sorted([list(e) for e in result.back_edges]),
                "dummy_chains": {f"{u}->{v}": chain for (u, v), chain in result.dummy_chains.items()},
                "edges": [
                    {"parent": u, "child": v, "user": info.user, "created_at": info.created_at}
                    for (u, v), info in sorted(workspace.hierarchy.edges.items())
                ],
            }
        )

    # ------------------------------------------------------- state snapshot

    if static_dir:
        from starlette.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    @app.post("/state/save")
    def save_state(body: dict = Body(...)):
        """Persist the current graph + point cloud pair when entering the
        annotation space, so the session can be resumed from /snapshots."""
        params = dict(state["graph_params"])
        graph = build_graph(workspace.corpus, **params)
        descriptor = workspace.snapshots.add(
            "graph",
            graph.to_json(),
            user=body.get("user"),
            parent_id=body.get("projection_id"),
        )
        return versioned({"snapshot_id": descriptor.snapshot_id})

    return app
