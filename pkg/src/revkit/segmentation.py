"""Sentence segmentation via an ensemble of pluggable rule-based splitters.

Several segmenters propose a segmentation of a paragraph and the ensemble
keeps the candidate with the fewest sentences, which suppresses most
spurious splits (e.g. inside numbers or abbreviations).  Protected nodes
(titles, list items) are never segmented.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Optional, Sequence

from .errors import SegmentationError
from .model import DocumentGraph, Granularity, attach_sentences, collapse_whitespace

Span = tuple[int, int]

_CLOSERS = "\"')\\]”’"
_BOUNDARY = re.compile(rf"([.!?]+)([{_CLOSERS}]*)(\s+)")


def load_abbreviations(path=None) -> frozenset[str]:
    """Load the abbreviation guard list; defaults to the bundled file."""
    if path is None:
        text = (
            resources.files("revkit").joinpath("data/abbreviations.txt").read_text()
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    entries = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            entries.add(line)
    return frozenset(entries)


_DEFAULT_ABBREVIATIONS = load_abbreviations()


@dataclass(frozen=True)
class Segmenter:
    name: str
    split: Callable[[str], list[Span]]


def _trim(text: str, start: int, end: int) -> Optional[Span]:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return (start, end) if start < end else None


def _split_at_boundaries(text: str, is_boundary) -> list[Span]:
    spans: list[Span] = []
    cursor = 0
    for match in _BOUNDARY.finditer(text):
        if not is_boundary(text, match):
            continue
        cut = match.end(2)  # keep punctuation and closing quotes in the span
        span = _trim(text, cursor, cut)
        if span:
            spans.append(span)
        cursor = match.end()
    tail = _trim(text, cursor, len(text))
    if tail:
        spans.append(tail)
    return spans


def _default_boundary(abbreviations: frozenset[str]):
    def is_boundary(text: str, match: re.Match) -> bool:
        nxt = match.end()
        if nxt >= len(text) or not text[nxt].isupper():
            return False
        # Decimals like "3.50" need no explicit guard: a boundary requires
        # whitespace right after the punctuation.
        punct_start = match.start(1)
        word = re.search(r"\S*$", text[:punct_start]).group(0)
        word = word.lstrip("(\"'“‘").rstrip(".").lower()
        if word in abbreviations:
            return False
        return True

    return is_boundary


def default_segmenter(
    text: str, abbreviations: frozenset[str] = _DEFAULT_ABBREVIATIONS
) -> list[Span]:
    """Split on {. ! ?} + whitespace + uppercase with abbreviation guards."""
    if not text:
        return []
    return _split_at_boundaries(text, _default_boundary(abbreviations))


def aggressive_segmenter(text: str) -> list[Span]:
    """Split after any sentence punctuation followed by whitespace, no guards."""
    if not text:
        return []
    return _split_at_boundaries(text, lambda t, m: True)


def _validate_spans(text: str, spans: Sequence[Span], segmenter_name: str) -> None:
    prev_end = 0
    for start, end in spans:
        if not (0 <= start < end <= len(text)):
            raise SegmentationError(
                f"segmenter {segmenter_name!r} produced an out-of-range span"
            )
        if start < prev_end:
            raise SegmentationError(
                f"segmenter {segmenter_name!r} produced overlapping spans"
            )
        prev_end = end
    rebuilt = collapse_whitespace(" ".join(text[s:e] for s, e in spans))
    if rebuilt != collapse_whitespace(text):
        raise SegmentationError(
            f"segmenter {segmenter_name!r} does not cover the paragraph text"
        )


def segment_paragraph(text: str, segmenters: Sequence[Segmenter]) -> list[Span]:
    """Run every segmenter and keep the candidate with the fewest sentences.

    Ties are broken by segmenter list order.  Span validity is checked for
    every candidate; an invalid candidate is an error naming the segmenter.
    """
    if not segmenters:
        raise SegmentationError("at least one segmenter is required")
    if not text.strip():
        return []
    best: Optional[list[Span]] = None
    for segmenter in segmenters:
        spans = segmenter.split(text)
        _validate_spans(text, spans, segmenter.name)
        if best is None or len(spans) < len(best):
            best = spans
    return best or []


def segment_document(
    graph: DocumentGraph, segmenters: Sequence[Segmenter]
) -> DocumentGraph:
    """Attach sentence nodes to every non-protected paragraph."""
    sentence_lists = {}
    for para in graph.paragraphs():
        if para.protected:
            continue
        spans = segment_paragraph(para.text, segmenters)
        sentence_lists[para.id] = [para.text[s:e] for s, e in spans]
    return attach_sentences(graph, sentence_lists)


def is_segmented(graph: DocumentGraph) -> bool:
    return any(n.granularity == Granularity.SENTENCE for n in graph.nodes)


REGISTRY: dict[str, Segmenter] = {
    "default": Segmenter("default", default_segmenter),
    "aggressive": Segmenter("aggressive", aggressive_segmenter),
}


def get_segmenters(names: Iterable[str]) -> list[Segmenter]:
    segmenters = []
    for name in names:
        try:
            segmenters.append(REGISTRY[name])
        except KeyError:
            raise SegmentationError(f"unknown segmenter: {name}") from None
    return segmenters
