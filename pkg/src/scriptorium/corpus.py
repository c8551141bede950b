"""Unified data model for the two source corpora.

Ingests newline-delimited JSON metadata files, normalizes label surfaces,
merges labels that normalize identically across datasets, and exposes the
cross-linked corpus used by every other module.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .errors import DanglingReference, EmptyTerm, ParseError
from .vecspace import VectorSpace, read_vector_file, write_vector_file

DATASET_IDS = ("A", "B")
LABEL_ORIGINS = ("A", "B", "both", "new")
LABEL_CATEGORIES = ("descriptive", "decorative", "interpretive")

SPACE_KINDS = ("word", "image", "description")


def default_stopwords() -> frozenset[str]:
    """French stopword list shipped with the package."""
    text = resources.files("scriptorium.data").joinpath("stopwords_fr.txt").read_text("utf-8")
    return parse_stopwords(text.splitlines())


def parse_stopwords(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def normalize_term(surface: str, stopwords: frozenset[str] = frozenset()) -> tuple[str, list[str]]:
    """Normalize a label surface and tokenize it.

    Returns (normalized, tokens). Normalization: canonical decomposition
    with combining marks dropped, lowercased, characters outside
    letters/digits/space/hyphen removed, whitespace collapsed. Stopwords
    are removed from tokens only when the term has more than one word; a
    term made entirely of stopwords keeps its whole normalized string as
    its single token.
    """
    if not surface or not surface.strip():
        raise EmptyTerm(f"blank surface {surface!r}")
    decomposed = unicodedata.normalize("NFD", surface)
    kept = []
    for ch in decomposed:
        if unicodedata.combining(ch):
            continue
        ch = ch.lower()
        if ch.isalnum() or ch == "-":
            kept.append(ch)
        elif ch.isspace():
            kept.append(" ")
        # anything else is dropped outright
    normalized = " ".join("".join(kept).split())
    if not normalized:
        raise EmptyTerm(f"nothing remains of {surface!r} after normalization")
    words = normalized.split(" ")
    if len(words) > 1:
        tokens = [w for w in words if w not in stopwords]
        if not tokens:
            tokens = [normalized]
    else:
        tokens = words
    return normalized, tokens


@dataclass
class Manuscript:
    id: str
    dataset: str
    shelfmark: str
    origin_place: Optional[str] = None
    date_range: Optional[tuple[int, int]] = None
    image_ids: list[str] = field(default_factory=list)


@dataclass
class ImageRecord:
    id: str
    manuscript_id: str
    dataset: str
    folio: str
    book: Optional[str] = None
    subject: Optional[str] = None
    description: Optional[str] = None
    label_ids: set[str] = field(default_factory=set)
    image_uri: Optional[str] = None


@dataclass
class LabelTerm:
    id: str
    surface: str
    normalized: str
    tokens: list[str]
    dataset_origin: str
    category: Optional[str] = None


@dataclass
class Corpus:
    """Cross-linked, loaded corpus plus its ingested vector spaces."""

    datasets: dict[str, str]
    manuscripts: dict[str, Manuscript]
    images: dict[str, ImageRecord]
    labels: dict[str, LabelTerm]
    spaces: dict[str, VectorSpace] = field(default_factory=dict)
    stopwords: frozenset[str] = field(default_factory=frozenset)
    label_alias: dict[str, str] = field(default_factory=dict)

    def label_by_normalized(self, normalized: str) -> Optional[LabelTerm]:
        for term in self.labels.values():
            if term.normalized == normalized:
                return term
        return None

    def images_carrying(self, label_id: str) -> list[ImageRecord]:
        return [img for img in sorted(self.images.values(), key=lambda i: i.id) if label_id in img.label_ids]

    def summary(self) -> dict:
        per_dataset = {}
        for ds in DATASET_IDS:
            per_dataset[ds] = {
                "name": self.datasets.get(ds, ds),
                "manuscripts": sum(1 for m in self.manuscripts.values() if m.dataset == ds),
                "images": sum(1 for i in self.images.values() if i.dataset == ds),
                "labels": sum(1 for l in self.labels.values() if l.dataset_origin == ds),
            }
        origin_counts = {origin: 0 for origin in LABEL_ORIGINS}
        for term in self.labels.values():
            origin_counts[term.dataset_origin] += 1
        return {
            "datasets": per_dataset,
            "manuscripts": len(self.manuscripts),
            "images": len(self.images),
            "labels": len(self.labels),
            "labels_by_origin": origin_counts,
            "spaces": {name: {"dim": s.dim, "entries": len(s)} for name, s in sorted(self.spaces.items())},
        }


def _read_ndjson(path: Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(str(path), lineno, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(str(path), lineno, "record is not an object")
            yield lineno, record


def _require(record: dict, key: str, path: Path, lineno: int):
    if key not in record or record[key] is None:
        raise ParseError(str(path), lineno, f"missing field {key!r}")
    return record[key]


def load_corpus(manifest_path: str | Path) -> Corpus:
    """Load a corpus from a manifest of relative file paths.

    Labels from the two datasets that normalize identically are merged
    into a single term with dataset_origin="both"; image label references
    are rewritten through the resulting alias map.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(str(manifest_path), exc.lineno, f"invalid JSON: {exc.msg}") from exc
    base = manifest_path.parent

    datasets = dict(manifest.get("datasets", {"A": "dataset-A", "B": "dataset-B"}))
    for ds in datasets:
        if ds not in DATASET_IDS:
            raise ParseError(str(manifest_path), 1, f"unknown dataset id {ds!r}")

    if "stopwords" in manifest:
        with open(base / manifest["stopwords"], encoding="utf-8") as fh:
            stopwords = parse_stopwords(fh)
    else:
        stopwords = default_stopwords()

    labels: dict[str, LabelTerm] = {}
    alias: dict[str, str] = {}
    by_normalized: dict[str, str] = {}
    labels_path = base / manifest["labels"]
    for lineno, rec in _read_ndjson(labels_path):
        label_id = str(_require(rec, "id", labels_path, lineno))
        surface = str(_require(rec, "surface", labels_path, lineno))
        origin = str(_require(rec, "dataset_origin", labels_path, lineno))
        if origin not in LABEL_ORIGINS:
            raise ParseError(str(labels_path), lineno, f"bad dataset_origin {origin!r}")
        category = rec.get("category")
        if category is not None and category not in LABEL_CATEGORIES:
            raise ParseError(str(labels_path), lineno, f"bad category {category!r}")
        try:
            normalized, tokens = normalize_term(surface, stopwords)
        except EmptyTerm as exc:
            raise ParseError(str(labels_path), lineno, str(exc)) from exc
        if label_id in labels or label_id in alias:
            raise ParseError(str(labels_path), lineno, f"duplicate label id {label_id!r}")

        if normalized in by_normalized:
            # Same normalized form seen before: merge, keeping the
            # lexicographically smaller id so merges are order-independent.
            kept_id = by_normalized[normalized]
            kept = labels[kept_id]
            merged_origin = _merge_origin(kept.dataset_origin, origin)
            winner = min(kept_id, label_id)
            loser = max(kept_id, label_id)
            term = LabelTerm(
                id=winner,
                surface=kept.surface if winner == kept_id else surface,
                normalized=normalized,
                tokens=tokens,
                dataset_origin=merged_origin,
                category=kept.category or category,
            )
            del labels[kept_id]
            labels[winner] = term
            by_normalized[normalized] = winner
            alias[loser] = winner
            for old, target in list(alias.items()):
                if target == loser:
                    alias[old] = winner
            if winner != kept_id:
                alias[kept_id] = winner
        else:
            labels[label_id] = LabelTerm(
                id=label_id,
                surface=surface,
                normalized=normalized,
                tokens=tokens,
                dataset_origin=origin,
                category=category,
            )
            by_normalized[normalized] = label_id

    manuscripts: dict[str, Manuscript] = {}
    manuscripts_path = base / manifest["manuscripts"]
    for lineno, rec in _read_ndjson(manuscripts_path):
        ms_id = str(_require(rec, "id", manuscripts_path, lineno))
        dataset = str(_require(rec, "dataset", manuscripts_path, lineno))
        if dataset not in DATASET_IDS:
            raise ParseError(str(manuscripts_path), lineno, f"bad dataset {dataset!r}")
        date_range = rec.get("date_range")
        if date_range is not None:
            start, end = int(date_range[0]), int(date_range[1])
            if start > end:
                raise ParseError(str(manuscripts_path), lineno, f"year_start {start} > year_end {end}")
            date_range = (start, end)
        image_ids = [str(i) for i in _require(rec, "image_ids", manuscripts_path, lineno)]
        if not image_ids:
            raise ParseError(str(manuscripts_path), lineno, f"manuscript {ms_id!r} lists no images")
        if ms_id in manuscripts:
            raise ParseError(str(manuscripts_path), lineno, f"duplicate manuscript id {ms_id!r}")
        manuscripts[ms_id] = Manuscript(
            id=ms_id,
            dataset=dataset,
            shelfmark=str(_require(rec, "shelfmark", manuscripts_path, lineno)),
            origin_place=rec.get("origin_place"),
            date_range=date_range,
            image_ids=image_ids,
        )

    images: dict[str, ImageRecord] = {}
    images_path = base / manifest["images"]
    dangling: set[str] = set()
    for lineno, rec in _read_ndjson(images_path):
        img_id = str(_require(rec, "id", images_path, lineno))
        dataset = str(_require(rec, "dataset", images_path, lineno))
        if dataset not in DATASET_IDS:
            raise ParseError(str(images_path), lineno, f"bad dataset {dataset!r}")
        if img_id in images:
            raise ParseError(str(images_path), lineno, f"duplicate image id {img_id!r}")
        ms_id = str(_require(rec, "manuscript_id", images_path, lineno))
        if ms_id not in manuscripts:
            dangling.add(f"image {img_id} -> manuscript {ms_id}")
        label_ids = set()
        for raw in rec.get("label_ids", []):
            resolved = alias.get(str(raw), str(raw))
            if resolved not in labels:
                dangling.add(f"image {img_id} -> label {raw}")
            label_ids.add(resolved)
        images[img_id] = ImageRecord(
            id=img_id,
            manuscript_id=ms_id,
            dataset=dataset,
            folio=str(_require(rec, "folio", images_path, lineno)),
            book=rec.get("book"),
            subject=rec.get("subject"),
            description=rec.get("description"),
            label_ids=label_ids,
            image_uri=rec.get("image_uri"),
        )

    for ms in manuscripts.values():
        for img_id in ms.image_ids:
            if img_id not in images:
                dangling.add(f"manuscript {ms.id} -> image {img_id}")
            elif images[img_id].manuscript_id != ms.id:
                dangling.add(f"manuscript {ms.id} <> image {img_id} (owned by {images[img_id].manuscript_id})")
    if dangling:
        raise DanglingReference(sorted(dangling))

    spaces: dict[str, VectorSpace] = {}
    for kind, rel in manifest.get("vector_spaces", {}).items():
        spaces[kind] = read_vector_file(base / rel, name=kind)

    return Corpus(
        datasets=datasets,
        manuscripts=manuscripts,
        images=images,
        labels=labels,
        spaces=spaces,
        stopwords=stopwords,
        label_alias=alias,
    )


def _merge_origin(a: str, b: str) -> str:
    if a == b:
        return a
    pair = {a, b}
    if pair <= {"A", "B"} or "both" in pair:
        return "both"
    # "new" merged with anything established keeps the established origin
    return (pair - {"new"}).pop()


def save_corpus(corpus: Corpus, out_dir: str | Path) -> Path:
    """Write a corpus back out in the manifest/NDJSON interchange format.

    Returns the manifest path; load_corpus on that path reproduces the
    corpus (round-trip identity up to derived alias bookkeeping).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(out_dir / "labels.ndjson", "w", encoding="utf-8") as fh:
        for term in sorted(corpus.labels.values(), key=lambda t: t.id):
            rec = {"id": term.id, "surface": term.surface, "dataset_origin": term.dataset_origin}
            if term.category:
                rec["category"] = term.category
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    with open(out_dir / "manuscripts.ndjson", "w", encoding="utf-8") as fh:
        for ms in sorted(corpus.manuscripts.values(), key=lambda m: m.id):
            rec = {
                "id": ms.id,
                "dataset": ms.dataset,
                "shelfmark": ms.shelfmark,
                "origin_place": ms.origin_place,
                "date_range": list(ms.date_range) if ms.date_range else None,
                "image_ids": list(ms.image_ids),
            }
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    with open(out_dir / "images.ndjson", "w", encoding="utf-8") as fh:
        for img in sorted(corpus.images.values(), key=lambda i: i.id):
            rec = {
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
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    with open(out_dir / "stopwords.txt", "w", encoding="utf-8") as fh:
        for word in sorted(corpus.stopwords):
            fh.write(word + "\n")

    space_files = {}
    for kind, space in sorted(corpus.spaces.items()):
        fname = f"vectors_{kind}.txt"
        write_vector_file(space, out_dir / fname)
        space_files[kind] = fname

    manifest = {
        "datasets": corpus.datasets,
        "manuscripts": "manuscripts.ndjson",
        "images": "images.ndjson",
        "labels": "labels.ndjson",
        "stopwords": "stopwords.txt",
        "vector_spaces": space_files,
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return manifest_path


def clone_corpus(corpus: Corpus) -> Corpus:
    """Deep-copy the mutable parts of a corpus (used by replay)."""
    return Corpus(
        datasets=dict(corpus.datasets),
        manuscripts={k: replace(m, image_ids=list(m.image_ids)) for k, m in corpus.manuscripts.items()},
        images={k: replace(i, label_ids=set(i.label_ids)) for k, i in corpus.images.items()},
        labels={k: replace(t, tokens=list(t.tokens)) for k, t in corpus.labels.items()},
        spaces=dict(corpus.spaces),
        stopwords=corpus.stopwords,
        label_alias=dict(corpus.label_alias),
    )
