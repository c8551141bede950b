"""Synthetic desk-scale corpus fixtures.

The real source corpora cannot be redistributed, so tests and demos run
on generated stand-ins: two datasets with a configurable shared-label
fraction, themed vocabulary clusters in the word space, themed image
clusters in the image-embedding space, and optional hierarchy seeds.
Output is byte-identical for a given seed.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np

from .corpus import default_stopwords, normalize_term

# Vocabulary clusters. Each theme becomes a tight cluster in the word
# space and (via per-manuscript theme preferences) a co-occurrence and
# image-embedding cluster.
THEMES: dict[str, list[str]] = {
    "musique": ["instrument de musique", "musique", "harpe", "trompette", "luth", "chantre", "cor"],
    "royaute": ["couronne", "roi", "reine", "sceptre", "trone", "david"],
    "oiseaux": ["oiseau", "cigogne", "aigle", "colombe", "faucon", "paon"],
    "mobilier": ["lit", "table", "siege", "pupitre", "coffre"],
    "figures": ["barbe", "chauve", "assis", "sommeil", "ange", "moine", "epee"],
    "decor": ["rinceau", "protome", "anthropomorphe", "dragon", "hybride", "initiale ornee"],
}

# Manuscripts preferring one theme may draw from a companion theme too,
# e.g. music imagery alongside crowns (king-as-musician iconography).
THEME_COMPANIONS = {"musique": "royaute", "oiseaux": "figures"}

BOOKS = ["Genese", "Exode", "Rois", "Psaumes", "Judith", "Marc", "Jean", "Apocalypse"]
PLACES = ["Paris", "Tours", "Bourges", "Reims", None]

DEFAULT_SHARED_FRACTION = 279 / 1985  # shared-vocabulary proportion of the source corpora


def generate_fixture(
    seed: int,
    n_manuscripts: int,
    n_images: int,
    n_labels: int,
    dim: int,
    out_dir: str | Path,
    shared_fraction: float = DEFAULT_SHARED_FRACTION,
    hierarchy_terms: int = 0,
) -> Path:
    """Write a complete fixture corpus under out_dir; returns the manifest path.

    n_labels counts the merged vocabulary: shared surfaces are written
    once per dataset (distinct ids, identical surface) and merge on load.
    """
    if min(n_manuscripts, n_images, n_labels) < 1:
        raise ValueError("all entity counts must be >= 1")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if not 0.0 <= shared_fraction <= 1.0:
        raise ValueError("shared_fraction must be in [0, 1]")

    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stopwords = default_stopwords()

    # --- vocabulary -------------------------------------------------------
    themed = [(theme, surface) for theme, surfaces in THEMES.items() for surface in surfaces]
    vocabulary: list[tuple[str, str]] = themed[:n_labels]
    i = 0
    while len(vocabulary) < n_labels:
        vocabulary.append(("divers", f"terme{i:04d}"))
        i += 1

    n_shared = round(shared_fraction * n_labels)
    shared_surfaces = set(s for _, s in rng.sample(vocabulary, n_shared))

    label_rows = []
    label_ids_by_dataset: dict[str, list[str]] = {"A": [], "B": []}
    theme_of_label: dict[str, str] = {}
    counter = {"A": 0, "B": 0}
    for theme, surface in vocabulary:
        if surface in shared_surfaces:
            datasets = ["A", "B"]
        else:
            datasets = [rng.choice(["A", "B"])]
        ids = []
        for ds in datasets:
            counter[ds] += 1
            label_id = f"{ds.lower()}-l{counter[ds]:04d}"
            label_rows.append({"id": label_id, "surface": surface, "dataset_origin": ds})
            ids.append(label_id)
        merged_id = min(ids)  # the id load_corpus keeps after merging
        for ds in datasets:
            label_ids_by_dataset[ds].append(merged_id)
        theme_of_label[merged_id] = theme

    # --- word vectors (one per distinct token, themed clusters) ----------
    theme_names = sorted({t for t, _ in vocabulary})
    centers = {t: nrng.normal(0.0, 6.0, size=dim) for t in theme_names}
    token_vectors: dict[str, np.ndarray] = {}
    for theme, surface in vocabulary:
        _, tokens = normalize_term(surface, stopwords)
        for tok in tokens:
            if tok not in token_vectors:
                token_vectors[tok] = centers[theme] + nrng.normal(0.0, 0.5, size=dim)

    # --- manuscripts ------------------------------------------------------
    manuscripts = []
    ms_theme: dict[str, str] = {}
    for n in range(n_manuscripts):
        ds = "A" if n % 2 == 0 else "B"
        ms_id = f"ms-{ds.lower()}{n:03d}"
        start = rng.randrange(1200, 1310, 5)
        manuscripts.append(
            {
                "id": ms_id,
                "dataset": ds,
                "shelfmark": f"Lat. {rng.randrange(10, 20000)}",
                "origin_place": rng.choice(PLACES),
                "date_range": [start, start + rng.randrange(0, 60, 10)] if rng.random() < 0.85 else None,
                "image_ids": [],
            }
        )
        ms_theme[ms_id] = rng.choice(theme_names)

    # --- images -----------------------------------------------------------
    image_center = {t: nrng.normal(0.0, 8.0, size=dim) for t in theme_names}
    images = []
    image_vectors: dict[str, np.ndarray] = {}
    description_vectors: dict[str, np.ndarray] = {}
    by_ms = {m["id"]: m for m in manuscripts}
    for n in range(n_images):
        ms = manuscripts[n % n_manuscripts] if n < n_manuscripts else rng.choice(manuscripts)
        img_id = f"img{n:05d}"
        ms["image_ids"].append(img_id)
        theme = ms_theme[ms["id"]]
        pool = [l for l in label_ids_by_dataset[ms["dataset"]] if theme_of_label[l] == theme]
        companion = THEME_COMPANIONS.get(theme)
        if companion:
            pool += [l for l in label_ids_by_dataset[ms["dataset"]] if theme_of_label[l] == companion]
        everything = label_ids_by_dataset[ms["dataset"]]
        n_lab = rng.choice([0, 0, 1, 1, 2, 2, 2, 3, 3, 4])
        chosen: set[str] = set()
        for _ in range(n_lab):
            src = pool if (pool and rng.random() < 0.75) else everything
            chosen.add(rng.choice(src))
        has_description = rng.random() < 0.6
        images.append(
            {
                "id": img_id,
                "manuscript_id": ms["id"],
                "dataset": ms["dataset"],
                "folio": f"{rng.randrange(1, 400)}{rng.choice(['r', 'v'])}",
                "book": rng.choice(BOOKS) if rng.random() < 0.7 else None,
                "subject": f"scene {theme}" if rng.random() < 0.5 else None,
                "description": f"une scene de {theme} ornee" if has_description else None,
                "label_ids": sorted(chosen),
                "image_uri": None,
            }
        )
        image_vectors[img_id] = image_center[theme] + nrng.normal(0.0, 1.0, size=dim)
        if has_description:
            description_vectors[img_id] = centers[theme] + nrng.normal(0.0, 0.8, size=dim)

    # Provenance guarantee: every shared label reachable from one image
    # in each dataset.
    shared_ids = sorted({min(ids) for ids in _group_ids_by_surface(label_rows).values() if len(ids) > 1})
    images_by_ds = {ds: [img for img in images if img["dataset"] == ds] for ds in ("A", "B")}
    for idx, label_id in enumerate(shared_ids):
        for ds in ("A", "B"):
            pool_imgs = images_by_ds[ds]
            if not pool_imgs:
                continue
            img = pool_imgs[idx % len(pool_imgs)]
            if label_id not in img["label_ids"]:
                img["label_ids"] = sorted(set(img["label_ids"]) | {label_id})

    # --- write everything -------------------------------------------------
    _write_ndjson(out_dir / "labels.ndjson", label_rows)
    _write_ndjson(out_dir / "manuscripts.ndjson", manuscripts)
    _write_ndjson(out_dir / "images.ndjson", images)
    _write_vectors(out_dir / "vectors_word.txt", token_vectors, dim)
    _write_vectors(out_dir / "vectors_image.txt", image_vectors, dim)
    _write_vectors(out_dir / "vectors_description.txt", description_vectors, dim)

    manifest = {
        "datasets": {"A": "corpus-alpha", "B": "corpus-beta"},
        "manuscripts": "manuscripts.ndjson",
        "images": "images.ndjson",
        "labels": "labels.ndjson",
        "vector_spaces": {
            "word": "vectors_word.txt",
            "image": "vectors_image.txt",
            "description": "vectors_description.txt",
        },
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    if hierarchy_terms:
        _write_hierarchy(out_dir / "hierarchy.json", hierarchy_terms, label_rows, theme_of_label, rng)

    return manifest_path


def _group_ids_by_surface(label_rows: list[dict]) -> dict[str, list[str]]:
    groups: dict[str, list[str]] = {}
    for row in label_rows:
        groups.setdefault(row["surface"], []).append(row["id"])
    return groups


def _write_ndjson(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def _write_vectors(path: Path, vectors: dict[str, np.ndarray], dim: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for key in sorted(vectors):
            fh.write(key + " " + " ".join(f"{x:.6f}" for x in vectors[key]) + "\n")


def _write_hierarchy(path: Path, n_terms: int, label_rows: list[dict], theme_of_label: dict[str, str], rng: random.Random) -> None:
    """Hierarchy seed: per-theme parents over merged label ids, padded with
    synthetic terms until n_terms nodes exist."""
    merged_ids = sorted({min(ids) for ids in _group_ids_by_surface(label_rows).values()})
    nodes = [{"id": label_id, "is_new": False} for label_id in merged_ids[:n_terms]]
    edges = []
    themes_present = sorted({theme_of_label[n["id"]] for n in nodes if n["id"] in theme_of_label})
    for theme in themes_present:
        parent = f"new-{theme}"
        nodes.append({"id": parent, "is_new": True})
        for node in nodes:
            if theme_of_label.get(node["id"]) == theme:
                edges.append({"parent": parent, "child": node["id"], "user": "seed", "created_at": "2024-01-01T00:00:00Z"})
    i = 0
    while len(nodes) < n_terms:
        child = f"new-extra{i:04d}"
        nodes.append({"id": child, "is_new": True})
        parent = rng.choice(themes_present) if themes_present else None
        if parent:
            edges.append({"parent": f"new-{parent}", "child": child, "user": "seed", "created_at": "2024-01-01T00:00:00Z"})
        i += 1
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"nodes": nodes, "edges": edges}, fh, ensure_ascii=False, indent=None, separators=(",", ":"))
        fh.write("\n")
