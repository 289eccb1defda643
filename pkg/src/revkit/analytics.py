"""Revision statistics: edit ratios, clustering, positions, agreement.

All functions are pure; corpus-level numbers are means over per-pair
reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import AnalyticsError
from .model import (
    CrossLink,
    CrossLinkKind,
    DocumentGraph,
    Edit,
    EditAction,
    EditIntent,
    Granularity,
    RequestKind,
    ReviewRequest,
)


def _sentence_edits(edits: Iterable[Edit]) -> list[Edit]:
    return [e for e in edits if e.granularity == Granularity.SENTENCE]


def _old_sentence_count(old_doc: DocumentGraph) -> int:
    count = len(old_doc.sentences())
    if count == 0:
        raise AnalyticsError("old document has no sentences")
    return count


def edit_ratio(edits: Iterable[Edit], old_doc: DocumentGraph) -> float:
    """Sentence edits divided by the old document's sentence count."""
    return len(_sentence_edits(edits)) / _old_sentence_count(old_doc)


def semantic_edit_ratio(edits: Iterable[Edit], old_doc: DocumentGraph) -> float:
    """Like edit_ratio, counting only edits with a meaning-changing intent."""
    semantic = [
        e for e in _sentence_edits(edits) if any(i.semantic for i in e.intents)
    ]
    return len(semantic) / _old_sentence_count(old_doc)


def crest_factor(counts: Sequence[float]) -> float:
    """Peak-to-RMS ratio of a count vector; 1.0 means evenly spread."""
    vec = np.asarray(counts, dtype=np.float64)
    if vec.size == 0 or not np.any(vec):
        raise AnalyticsError("no edits")
    if np.any(vec < 0):
        raise AnalyticsError("counts must be nonnegative")
    return float(vec.max() / np.sqrt(np.mean(vec**2)))


def edit_counts_by_container(
    edits: Iterable[Edit],
    old_doc: DocumentGraph,
    new_doc: DocumentGraph,
    granularity: Granularity = Granularity.PARAGRAPH,
) -> list[int]:
    """Sentence-edit counts per container of the new document.

    Deletions carry no new-version node; their old container index is
    mapped proportionally onto the new container axis.
    """
    containers = (
        new_doc.paragraphs()
        if granularity == Granularity.PARAGRAPH
        else new_doc.sections()
    )
    old_containers = (
        old_doc.paragraphs()
        if granularity == Granularity.PARAGRAPH
        else old_doc.sections()
    )
    index = {c.id: i for i, c in enumerate(containers)}
    old_index = {c.id: i for i, c in enumerate(old_containers)}
    counts = [0] * len(containers)
    if not counts:
        return counts
    for edit in _sentence_edits(edits):
        if edit.new_nodes:
            node_id = min(edit.new_nodes, key=new_doc.sentence_ordinal)
            container = new_doc.container_of(node_id, granularity)
            if container is not None and container.id in index:
                counts[index[container.id]] += 1
        else:
            node_id = min(edit.old_nodes, key=old_doc.sentence_ordinal)
            container = old_doc.container_of(node_id, granularity)
            if container is None or container.id not in old_index:
                continue
            rel = old_index[container.id] / len(old_containers)
            counts[min(int(rel * len(counts)), len(counts) - 1)] += 1
    return counts


@dataclass(frozen=True)
class PositionalHistogram:
    bins: int
    by_action: dict[str, list[int]]
    by_intent: dict[str, list[int]]


def positional_distribution(
    edits: Iterable[Edit],
    new_doc: DocumentGraph,
    old_doc: DocumentGraph,
    bins: int,
) -> PositionalHistogram:
    """Bin edits by relative sentence position, per action and per intent.

    Deletions are located in the old document, everything else in the new
    one.  An edit with several intents counts once per intent.
    """
    if bins < 1:
        raise AnalyticsError("bins must be >= 1")
    by_action: dict[str, list[int]] = {a.value: [0] * bins for a in EditAction}
    by_intent: dict[str, list[int]] = {i.value: [0] * bins for i in EditIntent}
    for edit in _sentence_edits(edits):
        if edit.new_nodes:
            doc = new_doc
            node_id = min(edit.new_nodes, key=doc.sentence_ordinal)
        else:
            doc = old_doc
            node_id = min(edit.old_nodes, key=doc.sentence_ordinal)
        total = len(doc.sentences())
        if total == 0:
            continue
        rel = doc.sentence_ordinal(node_id) / total
        bucket = min(int(rel * bins), bins - 1)
        by_action[edit.action.value][bucket] += 1
        for intent in edit.intents:
            by_intent[intent.value][bucket] += 1
    return PositionalHistogram(bins, by_action, by_intent)


def krippendorff_alpha(
    annotations: Sequence[Sequence[Optional[object]]], metric: str = "nominal"
) -> float:
    """Krippendorff's alpha over an item x annotator matrix.

    ``None`` marks a missing label.  Only the nominal metric is
    supported; computed via the standard coincidence matrix as
    1 - D_o / D_e.
    """
    if metric != "nominal":
        raise AnalyticsError(f"unsupported metric: {metric}")
    values = sorted(
        {v for row in annotations for v in row if v is not None}, key=repr
    )
    idx = {v: i for i, v in enumerate(values)}
    size = len(values)
    coincidence = np.zeros((size, size))
    any_pairable = False
    for row in annotations:
        present = [v for v in row if v is not None]
        m_u = len(present)
        if m_u < 2:
            continue
        any_pairable = True
        for a in range(m_u):
            for b in range(m_u):
                if a != b:
                    coincidence[idx[present[a]], idx[present[b]]] += 1.0 / (m_u - 1)
    if not any_pairable:
        raise AnalyticsError("no items with two or more annotations")
    n_c = coincidence.sum(axis=1)
    n = n_c.sum()
    observed = coincidence.sum() - np.trace(coincidence)
    expected = (n_c.sum() ** 2 - np.dot(n_c, n_c)) / (n - 1)
    if expected == 0:
        return 1.0
    return float(1.0 - observed / expected)


IMPACT_KEYS = ("not_acted", "single_edit", "multi_edit")


def request_impact(
    requests: Sequence[ReviewRequest], links: Sequence[CrossLink]
) -> dict[str, dict[str, float]]:
    """Per request kind: fractions realized by zero, one, or several edits."""
    link_counts: dict[str, int] = {}
    for link in links:
        if link.kind == CrossLinkKind.REVIEW_TO_EDIT:
            link_counts[link.sentence_id] = link_counts.get(link.sentence_id, 0) + 1
    result: dict[str, dict[str, float]] = {}
    for kind in RequestKind:
        if kind == RequestKind.NON_REQUEST:
            continue
        members = [r for r in requests if r.kind == kind]
        if not members:
            continue
        tallies = {key: 0 for key in IMPACT_KEYS}
        for request in members:
            count = link_counts.get(request.sentence_id, 0)
            if count == 0:
                tallies["not_acted"] += 1
            elif count == 1:
                tallies["single_edit"] += 1
            else:
                tallies["multi_edit"] += 1
        total = len(members)
        result[kind.value] = {key: tallies[key] / total for key in IMPACT_KEYS}
    return result


def summary_metrics(
    summary_sentence_ids: Sequence[str],
    ea_links: Sequence[CrossLink],
    edits: Sequence[Edit],
    human_flags: Mapping[str, Iterable[str]] | None = None,
) -> dict[str, float]:
    """Computable summary-quality measures.

    comprehensiveness: share of edits covered by at least one link;
    compactness: mean links per linked summary sentence; specificity and
    factuality: share of sentences not flagged "vague" / "incorrect".
    Organization is a recorded human judgment and is not computed here.
    """
    flags = {k: set(v) for k, v in (human_flags or {}).items()}
    links = [l for l in ea_links if l.kind == CrossLinkKind.RESPONSE_TO_EDIT]
    covered = {l.edit_id for l in links} & {e.id for e in edits}
    comprehensiveness = len(covered) / len(edits) if edits else 0.0
    per_sentence: dict[str, int] = {}
    for link in links:
        per_sentence[link.sentence_id] = per_sentence.get(link.sentence_id, 0) + 1
    compactness = (
        sum(per_sentence.values()) / len(per_sentence) if per_sentence else 0.0
    )
    total = len(summary_sentence_ids)
    specificity = (
        sum(1 for s in summary_sentence_ids if "vague" not in flags.get(s, set()))
        / total
        if total
        else 0.0
    )
    factuality = (
        sum(1 for s in summary_sentence_ids if "incorrect" not in flags.get(s, set()))
        / total
        if total
        else 0.0
    )
    return {
        "comprehensiveness": comprehensiveness,
        "compactness": compactness,
        "specificity": specificity,
        "factuality": factuality,
    }


def label_distribution(edits: Iterable[Edit]) -> dict[str, dict[str, float]]:
    """Proportions per action, per intent and per (action, intent) pair."""
    sentence_edits = _sentence_edits(edits)
    actions: dict[str, int] = {}
    intents: dict[str, int] = {}
    pairs: dict[str, int] = {}
    for edit in sentence_edits:
        actions[edit.action.value] = actions.get(edit.action.value, 0) + 1
        for intent in edit.intents:
            intents[intent.value] = intents.get(intent.value, 0) + 1
            key = f"{edit.action.value}/{intent.value}"
            pairs[key] = pairs.get(key, 0) + 1

    def proportions(counts: dict[str, int]) -> dict[str, float]:
        total = sum(counts.values())
        return {k: v / total for k, v in sorted(counts.items())} if total else {}

    return {
        "action": proportions(actions),
        "intent": proportions(intents),
        "action_intent": proportions(pairs),
    }


@dataclass(frozen=True)
class AnalyticsReport:
    edit_ratio: float
    semantic_edit_ratio: float
    cf_paragraph: Optional[float]
    cf_section: Optional[float]
    positional_histogram: PositionalHistogram
    label_distribution: dict[str, dict[str, float]] = field(default_factory=dict)
    request_impact: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "edit_ratio": self.edit_ratio,
            "semantic_edit_ratio": self.semantic_edit_ratio,
            "cf_paragraph": self.cf_paragraph,
            "cf_section": self.cf_section,
            "positional_histogram": {
                "bins": self.positional_histogram.bins,
                "by_action": self.positional_histogram.by_action,
                "by_intent": self.positional_histogram.by_intent,
            },
            "label_distribution": self.label_distribution,
            "request_impact": self.request_impact,
        }


def compute_report(
    edits: Sequence[Edit],
    old_doc: DocumentGraph,
    new_doc: DocumentGraph,
    requests: Sequence[ReviewRequest] = (),
    links: Sequence[CrossLink] = (),
    bins: int = 10,
) -> AnalyticsReport:
    """All per-pair statistics in one report."""
    def maybe_cf(granularity: Granularity) -> Optional[float]:
        counts = edit_counts_by_container(edits, old_doc, new_doc, granularity)
        try:
            return crest_factor(counts)
        except AnalyticsError:
            return None

    return AnalyticsReport(
        edit_ratio=edit_ratio(edits, old_doc),
        semantic_edit_ratio=semantic_edit_ratio(edits, old_doc),
        cf_paragraph=maybe_cf(Granularity.PARAGRAPH),
        cf_section=maybe_cf(Granularity.SECTION),
        positional_histogram=positional_distribution(edits, new_doc, old_doc, bins),
        label_distribution=label_distribution(edits),
        request_impact=request_impact(requests, links),
    )
