"""Edit topology: action derivation, correction merging, granularity lifting.

Corrections (link additions/removals, relabeling) are merged by
re-partitioning the bipartite link graph into connected components, each
of which becomes one edit with its action re-derived from topology.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import CorrectionError, DocumentError
from .model import (
    ContentSublabel,
    DocumentGraph,
    Edit,
    EditAction,
    EditIntent,
    Granularity,
    Provenance,
    collapse_whitespace,
    derive_action_for_counts,
    make_edit_id,
)

PARTITION_ACTIONS = (EditAction.MERGE, EditAction.SPLIT, EditAction.FUSION)


def derive_action(new_count: int, old_count: int) -> EditAction:
    """Map link topology (|new| x |old|) to an edit action.

    (1,0) Add, (0,1) Delete, (1,1) Modify, (1,n) Merge, (n,1) Split,
    (m,n) Fusion.  (0,0) is an error.
    """
    return derive_action_for_counts(new_count, old_count)


def _link_sublabels(
    new_ids: frozenset[str],
    old_ids: frozenset[str],
    old: DocumentGraph,
    new: DocumentGraph,
    overrides: Mapping[tuple[str, str], ContentSublabel] | None = None,
) -> tuple[tuple[tuple[str, str], ContentSublabel], ...]:
    """Per-link content label inside partition edits by exact-text comparison."""
    action = derive_action_for_counts(len(new_ids), len(old_ids))
    if action not in PARTITION_ACTIONS:
        return ()
    labels = []
    for n in sorted(new_ids):
        for o in sorted(old_ids):
            if overrides and (n, o) in overrides:
                label = overrides[(n, o)]
            elif collapse_whitespace(new.node(n).text) == collapse_whitespace(
                old.node(o).text
            ):
                label = ContentSublabel.IDENTICAL
            else:
                label = ContentSublabel.MODIFY
            labels.append(((n, o), label))
    return tuple(labels)


def build_edit(
    new_ids: Iterable[str],
    old_ids: Iterable[str],
    old: DocumentGraph,
    new: DocumentGraph,
    granularity: Granularity = Granularity.SENTENCE,
    intents: Iterable[EditIntent] = (),
    provenance: Provenance = Provenance.AUTO,
    sublabel_overrides: Mapping[tuple[str, str], ContentSublabel] | None = None,
) -> Edit:
    new_set, old_set = frozenset(new_ids), frozenset(old_ids)
    return Edit(
        id=make_edit_id(new_set, old_set),
        new_nodes=new_set,
        old_nodes=old_set,
        granularity=granularity,
        action=derive_action_for_counts(len(new_set), len(old_set)),
        sublabels=_link_sublabels(new_set, old_set, old, new, sublabel_overrides),
        intents=frozenset(intents),
        provenance=provenance,
    )


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _doc_order_key(edit: Edit, old: DocumentGraph, new: DocumentGraph):
    new_order = [new.sentences(), new.paragraphs(), new.sections()]
    idx = {}
    for nodes in new_order:
        for i, n in enumerate(nodes):
            idx[n.id] = i
    new_pos = min((idx.get(n, 10**9) for n in edit.new_nodes), default=10**9)
    old_idx = {}
    for nodes in [old.sentences(), old.paragraphs(), old.sections()]:
        for i, n in enumerate(nodes):
            old_idx[n.id] = i
    old_pos = min((old_idx.get(n, 10**9) for n in edit.old_nodes), default=10**9)
    return (new_pos, old_pos)


class _LinkState:
    """Bipartite link graph plus metadata carried through corrections."""

    def __init__(self, old: DocumentGraph, new: DocumentGraph):
        self.old = old
        self.new = new
        self.links: set[tuple[str, str]] = set()
        self.lone_new: set[str] = set()
        self.lone_old: set[str] = set()
        self.intent_hints: dict[str, set[EditIntent]] = {}
        self.original: dict[tuple[frozenset, frozenset], Edit] = {}
        self.intent_overrides: dict[tuple[frozenset, frozenset], frozenset] = {}
        self.sublabel_overrides: dict[tuple[str, str], ContentSublabel] = {}

    @classmethod
    def from_edits(
        cls, edits: Sequence[Edit], old: DocumentGraph, new: DocumentGraph
    ) -> "_LinkState":
        state = cls(old, new)
        for edit in edits:
            state.original[(edit.new_nodes, edit.old_nodes)] = edit
            for pair in edit.links():
                state.links.add(pair)
            for n in edit.new_nodes:
                state.lone_new.add(n)
                state.intent_hints.setdefault(n, set()).update(edit.intents)
            for o in edit.old_nodes:
                state.lone_old.add(o)
                state.intent_hints.setdefault(o, set()).update(edit.intents)
        return state

    def _check_node(self, node_id: str, side: str, position: int) -> None:
        graph = self.new if side == "new" else self.old
        if not graph.has_node(node_id):
            raise CorrectionError(
                f"op {position}: unknown {side} node {node_id!r}", position
            )

    def apply(self, op: Mapping, position: int) -> None:
        kind = op.get("op")
        if kind == "add_link":
            self._check_node(op.get("new_node", ""), "new", position)
            self._check_node(op.get("old_node", ""), "old", position)
            self.links.add((op["new_node"], op["old_node"]))
        elif kind == "remove_link":
            pair = (op.get("new_node", ""), op.get("old_node", ""))
            if pair not in self.links:
                raise CorrectionError(f"op {position}: no such link {pair}", position)
            self.links.remove(pair)
        elif kind == "set_intent":
            edit = self._find_edit(op.get("edit_id", ""), position)
            try:
                intents = frozenset(EditIntent(i) for i in op.get("intents", []))
            except ValueError as exc:
                raise CorrectionError(f"op {position}: {exc}", position) from None
            self.intent_overrides[(edit.new_nodes, edit.old_nodes)] = intents
        elif kind == "set_action_sublabel":
            self._check_node(op.get("new_node", ""), "new", position)
            self._check_node(op.get("old_node", ""), "old", position)
            try:
                label = ContentSublabel(op.get("label"))
            except ValueError:
                raise CorrectionError(
                    f"op {position}: unknown sublabel {op.get('label')!r}", position
                ) from None
            self.sublabel_overrides[(op["new_node"], op["old_node"])] = label
        else:
            raise CorrectionError(f"op {position}: unknown op {kind!r}", position)

    def _find_edit(self, edit_id: str, position: int) -> Edit:
        for edit in self.to_edits():
            if edit.id == edit_id:
                return edit
        raise CorrectionError(f"op {position}: unknown edit {edit_id!r}", position)

    def to_edits(self) -> list[Edit]:
        uf = _UnionFind()
        for n, o in self.links:
            uf.union(("n", n), ("o", o))
        for n in self.lone_new:
            uf.find(("n", n))
        for o in self.lone_old:
            uf.find(("o", o))

        components: dict = {}
        for key in list(uf.parent):
            components.setdefault(uf.find(key), []).append(key)

        edits = []
        for members in components.values():
            new_ids = frozenset(m[1] for m in members if m[0] == "n")
            old_ids = frozenset(m[1] for m in members if m[0] == "o")
            linked = any((n, o) in self.links for n in new_ids for o in old_ids)
            originally_present = (new_ids | old_ids) & (
                self.lone_new | self.lone_old
            )
            if not linked and not originally_present:
                # nodes only ever touched by a since-removed link
                continue
            signature = (new_ids, old_ids)
            prior = self.original.get(signature)
            if prior is not None:
                intents = prior.intents
                provenance = prior.provenance
            else:
                intents = frozenset().union(
                    *(self.intent_hints.get(x, set()) for x in new_ids | old_ids)
                ) if (new_ids | old_ids) else frozenset()
                if len(new_ids) == 1 and len(old_ids) == 1 and len(intents) > 1:
                    # conflicting inherited intents on a 1-to-1 edit: needs relabeling
                    intents = frozenset()
                provenance = Provenance.HUMAN
            if signature in self.intent_overrides:
                intents = self.intent_overrides[signature]
                provenance = Provenance.HUMAN
            edit = build_edit(
                new_ids,
                old_ids,
                self.old,
                self.new,
                Granularity.SENTENCE,
                intents,
                provenance,
                self.sublabel_overrides,
            )
            edits.append(edit)
        edits.sort(key=lambda e: _doc_order_key(e, self.old, self.new))
        return edits


def apply_corrections(
    auto_edits: Sequence[Edit],
    corrections: Sequence[Mapping],
    old: DocumentGraph,
    new: DocumentGraph,
) -> list[Edit]:
    """Apply correction ops and re-partition the link graph into edits.

    Ops are dicts: add_link / remove_link (new_node, old_node),
    set_intent (edit_id, intents), set_action_sublabel (new_node,
    old_node, label).  Unknown references are rejected with the op's
    position.  Edits whose final shape matches an input edit keep their
    provenance; everything else is marked human-corrected.
    """
    state = _LinkState.from_edits(auto_edits, old, new)
    for position, op in enumerate(corrections):
        state.apply(op, position)
    return state.to_edits()


def lift_edits(
    sentence_edits: Sequence[Edit],
    target: Granularity,
    old: DocumentGraph,
    new: DocumentGraph,
) -> list[Edit]:
    """Lift sentence edits to paragraph or section granularity.

    Containers reachable from one another through sentence edits form one
    lifted edit; its action is re-derived from the container topology and
    its intent set is the union of the member intents.
    """
    if target not in (Granularity.PARAGRAPH, Granularity.SECTION):
        raise DocumentError(f"cannot lift to granularity {target.value}")

    uf = _UnionFind()
    members: dict = {}
    for edit in sentence_edits:
        containers = []
        for n in edit.new_nodes:
            c = new.container_of(n, target)
            if c is not None:
                containers.append(("n", c.id))
        for o in edit.old_nodes:
            c = old.container_of(o, target)
            if c is not None:
                containers.append(("o", c.id))
        if not containers:
            continue
        first = containers[0]
        for other in containers[1:]:
            uf.union(first, other)
        for c in containers:
            uf.find(c)
            members.setdefault(c, []).append(edit)

    groups: dict = {}
    for key in list(uf.parent):
        groups.setdefault(uf.find(key), []).append(key)

    lifted = []
    for keys in groups.values():
        new_ids = frozenset(k[1] for k in keys if k[0] == "n")
        old_ids = frozenset(k[1] for k in keys if k[0] == "o")
        member_edits = {e.id: e for k in keys for e in members.get(k, [])}
        intents = frozenset().union(*(e.intents for e in member_edits.values()))
        provenances = {e.provenance for e in member_edits.values()}
        if Provenance.HUMAN in provenances:
            provenance = Provenance.HUMAN
        elif Provenance.LLM_ASSISTED in provenances:
            provenance = Provenance.LLM_ASSISTED
        else:
            provenance = Provenance.AUTO
        lifted.append(
            build_edit(new_ids, old_ids, old, new, target, intents, provenance)
        )
    lifted.sort(key=lambda e: _doc_order_key(e, old, new))
    return lifted
