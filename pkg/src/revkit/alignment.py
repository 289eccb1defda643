"""Sentence pre-alignment between two document versions.

The algorithm first drops identical paragraph pairs, then identical
sentence pairs, and computes a similarity tensor over the residual
sentences.  A new sentence is aligned to an old one when at least one
measure scores above t1 and every measure scores above t0 at that
candidate; among equally frequent candidates the one closest in relative
paragraph position wins.  Unaligned new sentences become additions,
unchosen old sentences deletions.

A two-stage variant re-examines the leftover addition/deletion pairs with
an LLM verdict and upgrades affirmed pairs to modifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AlignmentError, ProviderError, VerdictParseError
from .model import (
    DocumentGraph,
    Edit,
    EditAction,
    Granularity,
    Provenance,
    TextNode,
    collapse_whitespace,
    make_edit_id,
)
from .similarity import EmbeddingProvider, SimilarityMeasure, default_measures, sem_similarity


@dataclass(frozen=True)
class AlignConfig:
    """Thresholds and measure set for pre-alignment (defaults t0=40, t1=85)."""

    t0: float = 40.0
    t1: float = 85.0
    measures: tuple[SimilarityMeasure, ...] = ()

    def __post_init__(self):
        if not (0.0 < self.t0 < self.t1 < 100.0):
            raise AlignmentError("thresholds must satisfy 0 < t0 < t1 < 100")
        if not self.measures:
            object.__setattr__(self, "measures", tuple(default_measures()))


@dataclass(frozen=True)
class SimilarityTensor:
    """Scores with shape [len(measures), k residual new, l residual old]."""

    measure_names: tuple[str, ...]
    new_ids: tuple[str, ...]
    old_ids: tuple[str, ...]
    scores: np.ndarray = field(compare=False)


def _filter_identical(
    old: DocumentGraph, new: DocumentGraph
) -> tuple[list[TextNode], list[TextNode]]:
    """Drop identical paragraph pairs, then identical sentence pairs.

    Matching compares whitespace-collapsed text, greedily in document
    order; matched sentences take part in no edit at all.
    """
    # paragraph pass
    matched_old: set[str] = set()
    matched_new: set[str] = set()
    old_paras = old.paragraphs()
    for new_para in new.paragraphs():
        key = collapse_whitespace(new_para.text)
        for old_para in old_paras:
            if old_para.id in matched_old:
                continue
            if collapse_whitespace(old_para.text) == key:
                matched_old.add(old_para.id)
                matched_new.add(new_para.id)
                break

    def surviving(graph: DocumentGraph, matched_paras: set[str]) -> list[TextNode]:
        out = []
        for sent in graph.sentences():
            if sent.parent not in matched_paras:
                out.append(sent)
        return out

    new_sents = surviving(new, matched_new)
    old_sents = surviving(old, matched_old)

    # sentence pass
    matched_old_sents: set[str] = set()
    residual_new: list[TextNode] = []
    for sent in new_sents:
        key = collapse_whitespace(sent.text)
        for old_sent in old_sents:
            if old_sent.id in matched_old_sents:
                continue
            if collapse_whitespace(old_sent.text) == key:
                matched_old_sents.add(old_sent.id)
                break
        else:
            residual_new.append(sent)
    residual_old = [s for s in old_sents if s.id not in matched_old_sents]
    return residual_new, residual_old


def compute_tensor(
    new_sents: Sequence[TextNode],
    old_sents: Sequence[TextNode],
    measures: Sequence[SimilarityMeasure],
) -> SimilarityTensor:
    scores = np.zeros((len(measures), len(new_sents), len(old_sents)))
    for mi, measure in enumerate(measures):
        for i, ns in enumerate(new_sents):
            for j, os_ in enumerate(old_sents):
                scores[mi, i, j] = measure.score(ns.text, os_.text)
    return SimilarityTensor(
        tuple(m.name for m in measures),
        tuple(s.id for s in new_sents),
        tuple(s.id for s in old_sents),
        scores,
    )


def position_distance(
    p_new: int, new_paragraphs: int, p_old: int, old_paragraphs: int
) -> float:
    """|p_i/#P_new - p_j/#P_old| over 0-based linear paragraph indices."""
    return abs(p_new / new_paragraphs - p_old / old_paragraphs)


def location_distance(
    new: DocumentGraph, new_sentence_id: str, old: DocumentGraph, old_sentence_id: str
) -> float:
    """Relative-paragraph-position distance between two sentences."""
    return position_distance(
        new.paragraph_index(new_sentence_id),
        new.paragraph_count,
        old.paragraph_index(old_sentence_id),
        old.paragraph_count,
    )


def _require_segmented(graph: DocumentGraph, label: str) -> None:
    if not any(n.granularity == Granularity.SENTENCE for n in graph.nodes):
        raise AlignmentError(f"{label} document is not segmented to sentences")


def prealign(
    old: DocumentGraph, new: DocumentGraph, cfg: AlignConfig | None = None
) -> list[Edit]:
    """Produce sentence-level candidate edits (Modify / Add / Delete)."""
    cfg = cfg or AlignConfig()
    _require_segmented(old, "old")
    _require_segmented(new, "new")

    residual_new, residual_old = _filter_identical(old, new)
    tensor = compute_tensor(residual_new, residual_old, cfg.measures)
    n_measures, k, l = tensor.scores.shape

    chosen: dict[int, int] = {}
    for i in range(k):
        candidates: list[int] = []
        for mi in range(n_measures):
            if l == 0:
                break
            j_max = int(np.argmax(tensor.scores[mi, i, :]))  # ties -> smallest j
            if tensor.scores[mi, i, j_max] > cfg.t1 and all(
                tensor.scores[m2, i, j_max] > cfg.t0 for m2 in range(n_measures)
            ):
                candidates.append(j_max)
        if not candidates:
            continue
        top = max(candidates.count(j) for j in candidates)
        frequent = sorted({j for j in candidates if candidates.count(j) == top})
        if len(frequent) == 1:
            chosen[i] = frequent[0]
        else:
            chosen[i] = min(
                frequent,
                key=lambda j: (
                    location_distance(
                        new, residual_new[i].id, old, residual_old[j].id
                    ),
                    j,
                ),
            )

    # keep one aligned pair per old sentence; earliest new sentence wins
    used_old: set[int] = set()
    edits: list[Edit] = []
    for i in range(k):
        j = chosen.get(i)
        if j is not None and j not in used_old:
            used_old.add(j)
            new_id, old_id = residual_new[i].id, residual_old[j].id
            edits.append(
                Edit(
                    id=make_edit_id({new_id}, {old_id}),
                    new_nodes=frozenset({new_id}),
                    old_nodes=frozenset({old_id}),
                    granularity=Granularity.SENTENCE,
                    action=EditAction.MODIFY,
                    provenance=Provenance.AUTO,
                )
            )
        elif j is None or j in used_old:
            new_id = residual_new[i].id
            edits.append(
                Edit(
                    id=make_edit_id({new_id}, set()),
                    new_nodes=frozenset({new_id}),
                    old_nodes=frozenset(),
                    granularity=Granularity.SENTENCE,
                    action=EditAction.ADD,
                    provenance=Provenance.AUTO,
                )
            )
    for j in range(l):
        if j not in used_old:
            old_id = residual_old[j].id
            edits.append(
                Edit(
                    id=make_edit_id(set(), {old_id}),
                    new_nodes=frozenset(),
                    old_nodes=frozenset({old_id}),
                    granularity=Granularity.SENTENCE,
                    action=EditAction.DELETE,
                    provenance=Provenance.AUTO,
                )
            )
    return edits


def generate_alignment_negatives(
    edits: Sequence[Edit],
    old: DocumentGraph,
    new: DocumentGraph,
    embedder: EmbeddingProvider,
) -> list[tuple[str, str]]:
    """One negative per revision pair: the most semantically similar
    non-linked old sentence that itself belongs to some revision pair."""
    pairs = [
        (next(iter(e.new_nodes)), next(iter(e.old_nodes)))
        for e in edits
        if e.action == EditAction.MODIFY and e.granularity == Granularity.SENTENCE
    ]
    if len(pairs) < 2:
        return []
    negatives = []
    for new_id, old_id in pairs:
        partners = [o for _, o in pairs if o != old_id]
        new_text = new.node(new_id).text
        best = max(
            partners,
            key=lambda o: (sem_similarity(new_text, old.node(o).text, embedder), o),
        )
        negatives.append((new_id, best))
    return negatives


@dataclass(frozen=True)
class TwoStageResult:
    edits: tuple[Edit, ...]
    warnings: tuple[str, ...]


def two_stage_align(
    old: DocumentGraph,
    new: DocumentGraph,
    cfg: AlignConfig | None = None,
    chat=None,
    demos: Sequence = (),
) -> TwoStageResult:
    """Pre-align, then ask the chat provider about leftover Add/Delete pairs.

    Candidate pairs must exceed t0 on every measure.  An affirmative verdict
    turns the Add and Delete into one Modify edit with LLM provenance;
    provider or parse failures keep the automatic result and yield a warning.
    """
    from .llm import PromptConfig, build_alignment_prompt, parse_verdict

    cfg = cfg or AlignConfig()
    auto = prealign(old, new, cfg)
    if chat is None:
        return TwoStageResult(tuple(auto), ())

    adds = [e for e in auto if e.action == EditAction.ADD]
    deletes = [e for e in auto if e.action == EditAction.DELETE]
    remaining = {e.id: e for e in auto}
    warnings: list[str] = []
    prompt_cfg = PromptConfig()

    for add in adds:
        new_id = next(iter(add.new_nodes))
        for delete in deletes:
            if add.id not in remaining or delete.id not in remaining:
                continue
            old_id = next(iter(delete.old_nodes))
            new_text = new.node(new_id).text
            old_text = old.node(old_id).text
            if not all(
                m.score(new_text, old_text) > cfg.t0 for m in cfg.measures
            ):
                continue
            bundle = build_alignment_prompt((new_text, old_text), demos, prompt_cfg)
            try:
                verdict = parse_verdict(chat.complete(bundle), bundle.parse_template)
            except (ProviderError, VerdictParseError) as exc:
                warnings.append(f"candidate ({new_id}, {old_id}): {exc}")
                continue
            if verdict.label == "yes":
                del remaining[add.id]
                del remaining[delete.id]
                merged = Edit(
                    id=make_edit_id({new_id}, {old_id}),
                    new_nodes=frozenset({new_id}),
                    old_nodes=frozenset({old_id}),
                    granularity=Granularity.SENTENCE,
                    action=EditAction.MODIFY,
                    provenance=Provenance.LLM_ASSISTED,
                )
                remaining[merged.id] = merged
                break
    return TwoStageResult(tuple(remaining.values()), tuple(warnings))
