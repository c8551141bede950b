import pytest

from scriptorium.corpus import Corpus, ImageRecord, LabelTerm, Manuscript, normalize_term
from scriptorium.vecspace import VectorSpace


def make_label(label_id: str, surface: str, origin: str = "A", stopwords=frozenset()) -> LabelTerm:
    normalized, tokens = normalize_term(surface, stopwords)
    return LabelTerm(id=label_id, surface=surface, normalized=normalized, tokens=tokens, dataset_origin=origin)


def build_corpus(manuscripts, images, labels, spaces=None, stopwords=frozenset()) -> Corpus:
    """Assemble an in-memory corpus from entity lists."""
    return Corpus(
        datasets={"A": "corpus-alpha", "B": "corpus-beta"},
        manuscripts={m.id: m for m in manuscripts},
        images={i.id: i for i in images},
        labels={l.id: l for l in labels},
        spaces=spaces or {},
        stopwords=stopwords,
    )


@pytest.fixture
def tiny_corpus():
    """Two manuscripts (one per dataset), four images, four labels."""
    labels = [
        make_label("l-bird", "oiseau", "A"),
        make_label("l-crane", "cigogne", "both"),
        make_label("l-crown", "couronne", "B"),
        make_label("l-bed", "lit", "A"),
    ]
    images = [
        ImageRecord(id="img1", manuscript_id="m1", dataset="A", folio="1r", label_ids={"l-bird", "l-crane"}),
        ImageRecord(id="img2", manuscript_id="m1", dataset="A", folio="2r", label_ids={"l-bed"}, description="un lit"),
        ImageRecord(id="img3", manuscript_id="m2", dataset="B", folio="3v", label_ids={"l-crown", "l-crane"}),
        ImageRecord(id="img4", manuscript_id="m2", dataset="B", folio="4v", label_ids=set()),
    ]
    manuscripts = [
        Manuscript(id="m1", dataset="A", shelfmark="Lat. 1", date_range=(1240, 1260), image_ids=["img1", "img2"]),
        Manuscript(id="m2", dataset="B", shelfmark="Ms. 2", date_range=(1250, 1270), image_ids=["img3", "img4"]),
    ]
    word_space = VectorSpace(
        "word",
        2,
        {
            "oiseau": (1.0, 0.0),
            "cigogne": (0.9, 0.1),
            "couronne": (0.0, 1.0),
            "lit": (-1.0, 0.0),
        },
    )
    image_space = VectorSpace(
        "image",
        2,
        {"img1": (0.0, 0.0), "img2": (1.0, 0.0), "img3": (0.0, 1.0), "img4": (5.0, 5.0)},
    )
    description_space = VectorSpace("description", 2, {"img2": (-1.0, 0.2)})
    return build_corpus(
        manuscripts,
        images,
        labels,
        spaces={"word": word_space, "image": image_space, "description": description_space},
    )
