"""Shared fixtures and document-building helpers."""

from __future__ import annotations

import random

from revkit.model import DocumentGraph, build_document, graph_from_dict
from revkit.segmentation import get_segmenters, segment_document

SEGMENTERS = get_segmenters(["default", "aggressive"])


def make_doc(version: str, sections, doc_id: str = "d1") -> DocumentGraph:
    """Build a segmented document from [[paragraph, ...], ...] text lists."""
    payload = {
        "doc_id": doc_id,
        "version": version,
        "sections": [
            {"title": f"S{i}", "paragraphs": [{"text": p} for p in paras]}
            for i, paras in enumerate(sections)
        ],
    }
    return segment_document(build_document(payload), SEGMENTERS)


def make_doc_from_sentences(version: str, paragraphs, doc_id: str = "d1") -> DocumentGraph:
    """Build a one-section document with explicit sentence lists per paragraph."""
    payload = {
        "doc_id": doc_id,
        "version": version,
        "sections": [
            {
                "title": "S0",
                "paragraphs": [
                    {"text": " ".join(sents), "sentences": [{"text": s} for s in sents]}
                    for sents in paragraphs
                ],
            }
        ],
    }
    return graph_from_dict(payload)


_WORDS = (
    "model data results table method training loss accuracy baseline corpus "
    "analysis system figure section approach evaluation metric sample token "
    "layer network language document sentence paragraph revision review"
).split()


def random_sentence(rng: random.Random, n_words: int | None = None) -> str:
    n = n_words or rng.randint(3, 12)
    words = [rng.choice(_WORDS) for _ in range(n)]
    return (" ".join(words)).capitalize() + "."


def random_sentence_doc(
    rng: random.Random,
    version: str,
    n_sentences: int,
    doc_id: str = "d1",
    max_paragraphs: int = 4,
) -> DocumentGraph:
    """Random segmented document with exactly n_sentences sentences."""
    sentences = [random_sentence(rng) for _ in range(n_sentences)]
    n_paras = rng.randint(1, max_paragraphs)
    cuts = sorted(rng.sample(range(1, n_sentences), min(n_paras - 1, n_sentences - 1))) if n_sentences > 1 else []
    paragraphs = []
    prev = 0
    for cut in cuts + [n_sentences]:
        if cut > prev:
            paragraphs.append(sentences[prev:cut])
        prev = cut
    return make_doc_from_sentences(version, paragraphs, doc_id=doc_id)
