"""Core document-graph model: versioned documents, edits and cross-links.

A document version (old, new, review or response) is an ordered tree of
text nodes at section / paragraph / sentence granularity.  Edits link node
sets of the new version to node sets of the old version and carry an
action, an intent set and provenance.  All values are immutable after
construction; derived views are computed on demand.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DocumentError

SCHEMA_VERSION = 1


class Granularity(enum.Enum):
    SECTION = "section"
    PARAGRAPH = "paragraph"
    SENTENCE = "sentence"
    SUBSENTENCE = "subsentence"

    @property
    def rank(self) -> int:
        return _GRANULARITY_RANK[self]

    def __lt__(self, other: "Granularity") -> bool:
        return self.rank < other.rank

    def __le__(self, other: "Granularity") -> bool:
        return self.rank <= other.rank

    def __gt__(self, other: "Granularity") -> bool:
        return self.rank > other.rank

    def __ge__(self, other: "Granularity") -> bool:
        return self.rank >= other.rank


_GRANULARITY_RANK = {
    Granularity.SUBSENTENCE: 0,
    Granularity.SENTENCE: 1,
    Granularity.PARAGRAPH: 2,
    Granularity.SECTION: 3,
}


class Version(enum.Enum):
    OLD = "old"
    NEW = "new"
    REVIEW = "review"
    RESPONSE = "response"


class EditAction(enum.Enum):
    ADD = "add"
    DELETE = "delete"
    MODIFY = "modify"
    MERGE = "merge"
    SPLIT = "split"
    FUSION = "fusion"


class ContentSublabel(enum.Enum):
    """Per-link content label inside partition edits (merge/split/fusion)."""

    MODIFY = "modify"
    IDENTICAL = "identical"


class EditIntent(enum.Enum):
    GRAMMAR = "grammar"
    CLARITY = "clarity"
    FACT_EVIDENCE = "fact_evidence"
    CLAIM = "claim"
    OTHER = "other"

    @property
    def semantic(self) -> bool:
        """True for intents that change meaning rather than surface language."""
        return self in (EditIntent.FACT_EVIDENCE, EditIntent.CLAIM)


class Provenance(enum.Enum):
    AUTO = "auto"
    HUMAN = "human"
    LLM_ASSISTED = "llm_assisted"


class RequestKind(enum.Enum):
    EXPLICIT_EDIT = "explicit_edit"
    IMPLICIT_EDIT = "implicit_edit"
    GENERAL_WEAKNESS = "general_weakness"
    NON_REQUEST = "non_request"


class CrossLinkKind(enum.Enum):
    REVIEW_TO_EDIT = "review_to_edit"
    RESPONSE_TO_EDIT = "response_to_edit"


@dataclass(frozen=True)
class TextNode:
    id: str
    granularity: Granularity
    text: str
    parent: Optional[str]
    ordinal: int
    protected: bool = False


@dataclass(frozen=True)
class DocumentGraph:
    """One document version as an ordered tree of text nodes.

    ``nodes`` is in document (pre-)order: each section followed by its
    paragraphs, each paragraph followed by its sentences.
    """

    doc_id: str
    version: Version
    nodes: tuple[TextNode, ...]
    _index: Mapping[str, TextNode] = field(
        default=None, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        index = {}
        for node in self.nodes:
            if node.id in index:
                raise DocumentError(f"duplicate node id: {node.id}")
            index[node.id] = node
        for node in self.nodes:
            if node.parent is not None and node.parent not in index:
                raise DocumentError(f"node {node.id} has unknown parent {node.parent}")
        object.__setattr__(self, "_index", index)

    def node(self, node_id: str) -> TextNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise DocumentError(f"unknown node id: {node_id}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    def children(self, node_id: Optional[str]) -> list[TextNode]:
        kids = [n for n in self.nodes if n.parent == node_id]
        kids.sort(key=lambda n: n.ordinal)
        return kids

    def by_granularity(self, granularity: Granularity) -> list[TextNode]:
        # the synthetic root is excluded from granularity views
        return [
            n
            for n in self.nodes
            if n.granularity == granularity and n.parent is not None
        ]

    def sections(self) -> list[TextNode]:
        return self.by_granularity(Granularity.SECTION)

    def paragraphs(self) -> list[TextNode]:
        return self.by_granularity(Granularity.PARAGRAPH)

    def sentences(self) -> list[TextNode]:
        return self.by_granularity(Granularity.SENTENCE)

    @property
    def paragraph_count(self) -> int:
        return len(self.paragraphs())

    def paragraph_index(self, node_id: str) -> int:
        """Linear (0-based) index of the paragraph containing ``node_id``."""
        ancestor = self.node(node_id)
        while ancestor.granularity != Granularity.PARAGRAPH:
            if ancestor.parent is None:
                raise DocumentError(f"node {node_id} has no paragraph ancestor")
            ancestor = self.node(ancestor.parent)
        for i, p in enumerate(self.paragraphs()):
            if p.id == ancestor.id:
                return i
        raise DocumentError(f"paragraph {ancestor.id} not indexed")  # pragma: no cover

    def container_of(self, node_id: str, granularity: Granularity) -> Optional[TextNode]:
        """Nearest ancestor (or self) at the given granularity, if any."""
        node = self.node(node_id)
        while node.granularity < granularity:
            if node.parent is None:
                return None
            node = self.node(node.parent)
        return node if node.granularity == granularity else None

    def sentence_ordinal(self, node_id: str) -> int:
        """0-based position of a sentence among all sentences of the document."""
        for i, s in enumerate(self.sentences()):
            if s.id == node_id:
                return i
        raise DocumentError(f"not a sentence of this document: {node_id}")

    def with_nodes(self, nodes: Sequence[TextNode]) -> "DocumentGraph":
        return DocumentGraph(self.doc_id, self.version, tuple(nodes))


@dataclass(frozen=True)
class Edit:
    """A cross-version link set at one granularity.

    ``sublabels`` carries the per-link content label for partition edits,
    keyed by (new node id, old node id) and stored sorted for hashability.
    ``intents`` is empty until labeled; sentence-level edits carry at most
    one intent, lifted edits may carry several.
    """

    id: str
    new_nodes: frozenset[str]
    old_nodes: frozenset[str]
    granularity: Granularity
    action: EditAction
    sublabels: tuple[tuple[tuple[str, str], ContentSublabel], ...] = ()
    intents: frozenset[EditIntent] = frozenset()
    provenance: Provenance = Provenance.AUTO

    def sublabel_map(self) -> dict[tuple[str, str], ContentSublabel]:
        return dict(self.sublabels)

    def links(self) -> list[tuple[str, str]]:
        """All (new, old) node pairs implied by this edit."""
        return [(n, o) for n in sorted(self.new_nodes) for o in sorted(self.old_nodes)]

    def with_intents(self, intents: Iterable[EditIntent]) -> "Edit":
        return replace(self, intents=frozenset(intents))


@dataclass(frozen=True)
class ReviewRequest:
    sentence_id: str
    kind: RequestKind


@dataclass(frozen=True)
class CrossLink:
    kind: CrossLinkKind
    edit_id: str
    sentence_id: str


def make_edit_id(new_nodes: Iterable[str], old_nodes: Iterable[str]) -> str:
    """Deterministic edit id derived from the linked node sets.

    Content-addressed ids make journal replay and correction round-trips
    reproduce identical edit sets, ids included.
    """
    import hashlib

    key = "|".join(sorted(new_nodes)) + "<=" + "|".join(sorted(old_nodes))
    return "e:" + hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def normalize_text(text: str) -> str:
    """NFC normalization applied to all ingested text."""
    return unicodedata.normalize("NFC", text)


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def node_path_id(doc_id: str, version: Version, path: str) -> str:
    return f"{doc_id}:{version.value}:{path}"


def build_document(structured_input: Mapping) -> DocumentGraph:
    """Build a DocumentGraph from a nested section/paragraph record.

    Expected shape::

        {"doc_id": ..., "version": "old"|"new"|"review"|"response",
         "sections": [{"title": ..., "paragraphs": [{"text": ..., "protected": bool}]}]}

    Sentence nodes are not created here; see :mod:`revkit.segmentation`.
    Raises DocumentError for an empty document.
    """
    doc_id = structured_input.get("doc_id")
    if not doc_id:
        raise DocumentError("missing doc_id")
    try:
        version = Version(structured_input.get("version"))
    except ValueError:
        raise DocumentError(
            f"unknown version: {structured_input.get('version')!r}"
        ) from None
    sections = structured_input.get("sections") or []
    if not sections:
        raise DocumentError("empty document")

    root_id = node_path_id(doc_id, version, "root")
    nodes: list[TextNode] = [
        TextNode(root_id, Granularity.SECTION, "", None, 0, protected=True)
    ]
    any_paragraph = False
    for si, section in enumerate(sections):
        sec_id = node_path_id(doc_id, version, f"sec{si}")
        title = normalize_text(section.get("title") or "")
        nodes.append(
            TextNode(sec_id, Granularity.SECTION, title, root_id, si, protected=True)
        )
        for pi, para in enumerate(section.get("paragraphs") or []):
            text = normalize_text(para.get("text") or "")
            if not text:
                raise DocumentError(f"empty paragraph text in section {si}")
            any_paragraph = True
            par_id = node_path_id(doc_id, version, f"sec{si}.p{pi}")
            nodes.append(
                TextNode(
                    par_id,
                    Granularity.PARAGRAPH,
                    text,
                    sec_id,
                    pi,
                    protected=bool(para.get("protected", False)),
                )
            )
    if not any_paragraph:
        raise DocumentError("empty document")
    return DocumentGraph(doc_id, version, tuple(nodes))


def derive_action_for_counts(new_count: int, old_count: int) -> EditAction:
    """Topology-to-action mapping shared with the edit-graph module."""
    if new_count == 0 and old_count == 0:
        raise DocumentError("edit with no nodes on either side")
    if old_count == 0:
        return EditAction.ADD
    if new_count == 0:
        return EditAction.DELETE
    if new_count == 1 and old_count == 1:
        return EditAction.MODIFY
    if new_count == 1:
        return EditAction.MERGE
    if old_count == 1:
        return EditAction.SPLIT
    return EditAction.FUSION


def validate_edit(
    edit: Edit, old: DocumentGraph, new: DocumentGraph
) -> list[str]:
    """Check every Edit invariant; returns the violated ones by name.

    An empty list means the edit is well-formed.  Dangling node ids are
    reported as violations, never raised.
    """
    violations: list[str] = []
    if not edit.new_nodes and not edit.old_nodes:
        violations.append("empty edit: no nodes on either side")
        return violations

    granularities = set()
    for node_id in sorted(edit.new_nodes):
        if not new.has_node(node_id):
            violations.append(f"dangling node id: {node_id} (new document)")
        else:
            granularities.add(new.node(node_id).granularity)
    for node_id in sorted(edit.old_nodes):
        if not old.has_node(node_id):
            violations.append(f"dangling node id: {node_id} (old document)")
        else:
            granularities.add(old.node(node_id).granularity)

    if granularities and granularities != {edit.granularity}:
        violations.append("granularity mismatch")

    expected = derive_action_for_counts(len(edit.new_nodes), len(edit.old_nodes))
    if edit.action != expected:
        violations.append(
            f"topology/action mismatch: expected {expected.name.capitalize()}"
        )
    elif edit.action == EditAction.ADD and len(edit.new_nodes) != 1:
        violations.append("add edit must reference exactly one new node")
    elif edit.action == EditAction.DELETE and len(edit.old_nodes) != 1:
        violations.append("delete edit must reference exactly one old node")

    if edit.granularity == Granularity.SENTENCE and len(edit.intents) > 1:
        violations.append("sentence edit with multiple intents")
    return violations


def check_partition(edits: Iterable[Edit]) -> list[str]:
    """Report node ids occurring in more than one edit per side."""
    seen_new: set[str] = set()
    seen_old: set[str] = set()
    violations = []
    for edit in edits:
        for node_id in edit.new_nodes:
            if node_id in seen_new:
                violations.append(f"new node in multiple edits: {node_id}")
            seen_new.add(node_id)
        for node_id in edit.old_nodes:
            if node_id in seen_old:
                violations.append(f"old node in multiple edits: {node_id}")
            seen_old.add(node_id)
    return violations


# --- serialization ----------------------------------------------------------


def graph_to_dict(graph: DocumentGraph) -> dict:
    sections = []
    for section in graph.children(graph.nodes[0].id):
        paragraphs = []
        for para in graph.children(section.id):
            record: dict = {"text": para.text, "protected": para.protected}
            kids = graph.children(para.id)
            if kids:
                record["sentences"] = [{"text": s.text} for s in kids]
            paragraphs.append(record)
        sections.append({"title": section.text, "paragraphs": paragraphs})
    return {
        "schema_version": SCHEMA_VERSION,
        "doc_id": graph.doc_id,
        "version": graph.version.value,
        "sections": sections,
    }


def graph_from_dict(payload: Mapping) -> DocumentGraph:
    graph = build_document(payload)
    sentence_lists = {}
    for si, section in enumerate(payload.get("sections") or []):
        for pi, para in enumerate(section.get("paragraphs") or []):
            sents = para.get("sentences")
            if sents:
                par_id = node_path_id(graph.doc_id, graph.version, f"sec{si}.p{pi}")
                sentence_lists[par_id] = [normalize_text(s["text"]) for s in sents]
    if sentence_lists:
        graph = attach_sentences(graph, sentence_lists)
    return graph


def attach_sentences(
    graph: DocumentGraph, sentences_by_paragraph: Mapping[str, Sequence[str]]
) -> DocumentGraph:
    """Return a new graph with sentence nodes under the given paragraphs."""
    nodes: list[TextNode] = []
    for node in graph.nodes:
        nodes.append(node)
        if node.id in sentences_by_paragraph:
            if node.granularity != Granularity.PARAGRAPH:
                raise DocumentError(f"not a paragraph: {node.id}")
            if node.protected:
                raise DocumentError(f"protected node cannot have sentences: {node.id}")
            for k, text in enumerate(sentences_by_paragraph[node.id]):
                nodes.append(
                    TextNode(f"{node.id}.s{k}", Granularity.SENTENCE, text, node.id, k)
                )
    return graph.with_nodes(nodes)


def edit_to_dict(edit: Edit) -> dict:
    return {
        "id": edit.id,
        "new_nodes": sorted(edit.new_nodes),
        "old_nodes": sorted(edit.old_nodes),
        "granularity": edit.granularity.value,
        "action": edit.action.value,
        "sublabels": [
            {"new": link[0], "old": link[1], "label": label.value}
            for link, label in edit.sublabels
        ],
        "intents": sorted(i.value for i in edit.intents),
        "provenance": edit.provenance.value,
    }


def edit_from_dict(payload: Mapping) -> Edit:
    try:
        sublabels = tuple(
            sorted(
                ((s["new"], s["old"]), ContentSublabel(s["label"]))
                for s in payload.get("sublabels", [])
            )
        )
        return Edit(
            id=payload["id"],
            new_nodes=frozenset(payload.get("new_nodes", [])),
            old_nodes=frozenset(payload.get("old_nodes", [])),
            granularity=Granularity(payload["granularity"]),
            action=EditAction(payload["action"]),
            sublabels=sublabels,
            intents=frozenset(EditIntent(i) for i in payload.get("intents", [])),
            provenance=Provenance(payload.get("provenance", "auto")),
        )
    except KeyError as exc:
        raise DocumentError(f"edit record missing field: {exc}") from None
    except ValueError as exc:
        raise DocumentError(f"edit record invalid: {exc}") from None
