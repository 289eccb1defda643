"""Loading, saving and dataset construction for document pairs.

File formats: document JSON (sections/paragraphs, optional sentences),
edit annotation JSONL (one edit per line), manifest JSON listing the
pairs of a corpus.  Review documents may carry "requests" and "links"
arrays alongside the document fields.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .alignment import generate_alignment_negatives
from .errors import SchemaError
from .model import (
    CrossLink,
    CrossLinkKind,
    DocumentGraph,
    Edit,
    EditAction,
    Granularity,
    RequestKind,
    ReviewRequest,
    edit_from_dict,
    edit_to_dict,
    graph_from_dict,
    graph_to_dict,
    validate_edit,
)
from .similarity import EmbeddingProvider

DEFAULT_NEGATIVE_RATIO = 440 / 560  # review-request negatives per positive


def save_document(graph: DocumentGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=2))


def load_document(path) -> DocumentGraph:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read document: {exc}", str(path)) from None
    try:
        return graph_from_dict(payload)
    except Exception as exc:
        raise SchemaError(str(exc), str(path)) from None


def save_edits_jsonl(edits: Sequence[Edit], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for edit in edits:
            fh.write(json.dumps(edit_to_dict(edit)) + "\n")


def load_edits_jsonl(path) -> list[Edit]:
    edits = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                edits.append(edit_from_dict(json.loads(line)))
            except Exception as exc:
                raise SchemaError(str(exc), str(path), lineno) from None
    return edits


def _load_review(path) -> tuple[DocumentGraph, list[ReviewRequest], list[CrossLink]]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read review: {exc}", str(path)) from None
    try:
        graph = graph_from_dict(payload)
        requests = [
            ReviewRequest(r["sentence_id"], RequestKind(r["kind"]))
            for r in payload.get("requests", [])
        ]
        links = [
            CrossLink(CrossLinkKind(l["kind"]), l["edit_id"], l["sentence_id"])
            for l in payload.get("links", [])
        ]
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"invalid review record: {exc}", str(path)) from None
    return graph, requests, links


@dataclass(frozen=True)
class ManifestEntry:
    pair_id: str
    old_path: Path
    new_path: Path
    review_paths: tuple[Path, ...] = ()
    response_path: Optional[Path] = None
    annotation_path: Optional[Path] = None


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...]
    seed: int = 0

    def entry(self, pair_id: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.pair_id == pair_id:
                return entry
        raise SchemaError(f"unknown pair: {pair_id}")


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read manifest: {exc}", str(path)) from None
    base = path.parent
    entries = []
    seen = set()
    for record in payload.get("entries", []):
        try:
            entry = ManifestEntry(
                pair_id=record["pair_id"],
                old_path=base / record["old_path"],
                new_path=base / record["new_path"],
                review_paths=tuple(base / p for p in record.get("review_paths", [])),
                response_path=(
                    base / record["response_path"]
                    if record.get("response_path")
                    else None
                ),
                annotation_path=(
                    base / record["annotation_path"]
                    if record.get("annotation_path")
                    else None
                ),
            )
        except KeyError as exc:
            raise SchemaError(f"manifest entry missing {exc}", str(path)) from None
        if entry.pair_id in seen:
            raise SchemaError(
                f"duplicate pair_id: {entry.pair_id}", str(path)
            )
        seen.add(entry.pair_id)
        for p in (entry.old_path, entry.new_path, *entry.review_paths):
            if not Path(p).exists():
                raise SchemaError(f"missing file: {p}", str(path))
        entries.append(entry)
    return CorpusManifest(tuple(entries), seed=int(payload.get("seed", 0)))


@dataclass(frozen=True)
class LoadedPair:
    pair_id: str
    old: DocumentGraph
    new: DocumentGraph
    edits: tuple[Edit, ...] = ()
    reviews: tuple[DocumentGraph, ...] = ()
    requests: tuple[ReviewRequest, ...] = ()
    links: tuple[CrossLink, ...] = ()


def load_pair(entry: ManifestEntry) -> LoadedPair:
    """Load and validate one manifest entry.

    Every edit is checked against the document-model invariants; the
    first violation aborts the load with file and line information.
    """
    old = load_document(entry.old_path)
    new = load_document(entry.new_path)
    edits: list[Edit] = []
    if entry.annotation_path is not None:
        edits = load_edits_jsonl(entry.annotation_path)
        edit_ids = set()
        for lineno, edit in enumerate(edits, start=1):
            if edit.id in edit_ids:
                raise SchemaError(
                    f"duplicate edit id: {edit.id}",
                    str(entry.annotation_path),
                    lineno,
                )
            edit_ids.add(edit.id)
            violations = validate_edit(edit, old, new)
            if violations:
                raise SchemaError(
                    f"invalid edit {edit.id}: " + "; ".join(violations),
                    str(entry.annotation_path),
                    lineno,
                )
    reviews = []
    requests: list[ReviewRequest] = []
    links: list[CrossLink] = []
    for review_path in entry.review_paths:
        graph, review_requests, review_links = _load_review(review_path)
        reviews.append(graph)
        requests.extend(review_requests)
        links.extend(review_links)
    return LoadedPair(
        entry.pair_id,
        old,
        new,
        tuple(edits),
        tuple(reviews),
        tuple(requests),
        tuple(links),
    )


def load_corpus(manifest: CorpusManifest) -> list[LoadedPair]:
    return [load_pair(entry) for entry in manifest.entries]


# --- dataset construction ---------------------------------------------------


@dataclass(frozen=True)
class Split:
    train: tuple
    test: tuple


def split_documents(ids: Sequence[str], seed: int, train_fraction: float = 0.2) -> Split:
    """Deterministic document-level split; train gets the floor share."""
    shuffled = list(ids)
    random.Random(seed).shuffle(shuffled)
    n_train = int(len(shuffled) * train_fraction)
    if n_train == 0 and shuffled:
        warnings.warn("corpus too small for a non-empty training split")
    return Split(tuple(shuffled[:n_train]), tuple(shuffled[n_train:]))


def split_intent_dataset(pairs: Sequence[LoadedPair], seed: int) -> Split:
    """20/80 train/test split of labeled pairs at document granularity."""
    doc_split = split_documents([p.pair_id for p in pairs], seed)
    by_id = {p.pair_id: p for p in pairs}
    return Split(
        tuple(by_id[i] for i in doc_split.train),
        tuple(by_id[i] for i in doc_split.test),
    )


@dataclass(frozen=True)
class AlignmentSample:
    pair_id: str
    new_text: str
    old_text: str
    label: int  # 1 = revision pair, 0 = negative


def build_alignment_dataset(
    pairs: Sequence[LoadedPair], embedder: EmbeddingProvider, seed: int
) -> Split:
    """Revision pairs plus an equal number of hard negatives, split 20/80."""
    samples_by_doc: dict[str, list[AlignmentSample]] = {}
    for pair in pairs:
        samples: list[AlignmentSample] = []
        for edit in pair.edits:
            if (
                edit.granularity == Granularity.SENTENCE
                and edit.action == EditAction.MODIFY
            ):
                new_id = next(iter(edit.new_nodes))
                old_id = next(iter(edit.old_nodes))
                samples.append(
                    AlignmentSample(
                        pair.pair_id,
                        pair.new.node(new_id).text,
                        pair.old.node(old_id).text,
                        1,
                    )
                )
        for new_id, old_id in generate_alignment_negatives(
            pair.edits, pair.old, pair.new, embedder
        ):
            samples.append(
                AlignmentSample(
                    pair.pair_id,
                    pair.new.node(new_id).text,
                    pair.old.node(old_id).text,
                    0,
                )
            )
        if samples:
            samples_by_doc[pair.pair_id] = samples
    doc_split = split_documents(sorted(samples_by_doc), seed)
    train = tuple(s for d in doc_split.train for s in samples_by_doc[d])
    test = tuple(s for d in doc_split.test for s in samples_by_doc[d])
    return Split(train, test)


@dataclass(frozen=True)
class RequestSample:
    doc_id: str
    sentence_id: str
    text: str
    label: int  # 1 = edit request, 0 = negative


def build_request_dataset(
    pairs: Sequence[LoadedPair],
    seed: int,
    negative_ratio: float = DEFAULT_NEGATIVE_RATIO,
) -> Split:
    """Edit-request sentences plus sampled negatives from the same reviews.

    Negatives are drawn uniformly (seeded) from review sentences not
    annotated as requests, floor(ratio * positives) of them; raises when
    too few are available.
    """
    samples_by_doc: dict[str, list[RequestSample]] = {}
    rng = random.Random(seed)
    for pair in pairs:
        positive_ids = {
            r.sentence_id for r in pair.requests if r.kind != RequestKind.NON_REQUEST
        }
        positives = []
        candidates = []
        for review in pair.reviews:
            for sent in review.sentences():
                if sent.id in positive_ids:
                    positives.append(
                        RequestSample(pair.pair_id, sent.id, sent.text, 1)
                    )
                else:
                    candidates.append(
                        RequestSample(pair.pair_id, sent.id, sent.text, 0)
                    )
        if not positives:
            continue
        wanted = int(len(positives) * negative_ratio)
        if wanted > len(candidates):
            raise SchemaError(
                f"pair {pair.pair_id}: need {wanted} negatives, "
                f"only {len(candidates)} non-request sentences available"
            )
        negatives = rng.sample(sorted(candidates, key=lambda s: s.sentence_id), wanted)
        samples_by_doc[pair.pair_id] = positives + negatives
    doc_split = split_documents(sorted(samples_by_doc), seed)
    train = tuple(s for d in doc_split.train for s in samples_by_doc[d])
    test = tuple(s for d in doc_split.test for s in samples_by_doc[d])
    return Split(train, test)


def find_dataset(root) -> Optional[CorpusManifest]:
    """Best-effort adapter for an externally ingested corpus.

    Expects ``manifest.json`` in ``root`` following the manifest schema;
    returns None when absent so dataset-dependent checks can skip.
    """
    manifest_path = Path(root) / "manifest.json"
    if not manifest_path.exists():
        return None
    return load_manifest(manifest_path)
