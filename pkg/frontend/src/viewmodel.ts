/** Pure view-model for the side-by-side diff surface.
 *
 * Turns a pair payload into renderable columns (sections > paragraphs >
 * sentences for each version) plus one connector per edit linking its
 * sentences across the two columns. Sentences that belong to no edit are
 * unchanged between versions and get no connector.
 */

import type { DocNode, Edit, EditAction, EditIntent, PairPayload } from "./types.js";

export interface SentenceRow {
  id: string;
  text: string;
  ordinal: number;
  /** id of the edit touching this sentence, if any. */
  editId: string | null;
}

export interface ParagraphView {
  id: string;
  sentences: SentenceRow[];
}

export interface SectionView {
  id: string;
  title: string;
  paragraphs: ParagraphView[];
}

export interface Connector {
  editId: string;
  action: EditAction;
  intents: EditIntent[];
  provenance: string;
  newSentences: string[];
  oldSentences: string[];
  validated: boolean;
}

export interface PairView {
  pairId: string;
  revision: number;
  oldColumn: SectionView[];
  newColumn: SectionView[];
  connectors: Connector[];
  empty: boolean;
}

function sentenceEditIndex(edits: Edit[]): Map<string, string> {
  const index = new Map<string, string>();
  for (const edit of edits) {
    for (const node of [...edit.new_nodes, ...edit.old_nodes]) {
      index.set(node, edit.id);
    }
  }
  return index;
}

export function buildColumn(
  nodes: DocNode[],
  editIndex: Map<string, string>
): SectionView[] {
  const byParent = new Map<string | null, DocNode[]>();
  for (const node of nodes) {
    const bucket = byParent.get(node.parent) ?? [];
    bucket.push(node);
    byParent.set(node.parent, bucket);
  }
  for (const bucket of byParent.values()) {
    bucket.sort((a, b) => a.ordinal - b.ordinal);
  }
  const root = nodes.find((n) => n.parent === null);
  if (!root) {
    return [];
  }
  const sections: SectionView[] = [];
  for (const section of byParent.get(root.id) ?? []) {
    const paragraphs: ParagraphView[] = [];
    for (const paragraph of byParent.get(section.id) ?? []) {
      const sentences: SentenceRow[] = (byParent.get(paragraph.id) ?? []).map(
        (s) => ({
          id: s.id,
          text: s.text,
          ordinal: s.ordinal,
          editId: editIndex.get(s.id) ?? null,
        })
      );
      paragraphs.push({ id: paragraph.id, sentences });
    }
    sections.push({ id: section.id, title: section.text, paragraphs });
  }
  return sections;
}

export function buildConnectors(edits: Edit[]): Connector[] {
  return edits.map((edit) => ({
    editId: edit.id,
    action: edit.action,
    intents: edit.intents,
    provenance: edit.provenance,
    newSentences: [...edit.new_nodes].sort(),
    oldSentences: [...edit.old_nodes].sort(),
    validated: edit.provenance !== "auto",
  }));
}

export function buildPairView(payload: PairPayload): PairView {
  const editIndex = sentenceEditIndex(payload.edits);
  return {
    pairId: payload.pair_id,
    revision: payload.revision,
    oldColumn: buildColumn(
      payload.old_nodes.filter((n) => n.granularity !== "subsentence"),
      editIndex
    ),
    newColumn: buildColumn(
      payload.new_nodes.filter((n) => n.granularity !== "subsentence"),
      editIndex
    ),
    connectors: buildConnectors(payload.edits),
    empty: payload.edits.length === 0,
  };
}

/** Order in which keyboard navigation cycles through unvalidated edits. */
export function unvalidatedCycle(view: PairView): string[] {
  return view.connectors.filter((c) => !c.validated).map((c) => c.editId);
}

/** Soft taxonomy hints: adds and deletes introduce or drop content, so
 * surface-language intents are flagged (never blocked). */
export function labelWarnings(
  action: EditAction,
  intents: EditIntent[]
): string[] {
  const warnings: string[] = [];
  if (action === "add" || action === "delete") {
    for (const intent of intents) {
      if (intent === "grammar" || intent === "clarity") {
        warnings.push(
          `intent "${intent}" is unusual for ${action} edits; double-check`
        );
      }
    }
  }
  return warnings;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderColumn(column: SectionView[], side: string): string {
  const parts: string[] = [`<div class="column column-${side}">`];
  for (const section of column) {
    parts.push(`<section data-id="${escapeHtml(section.id)}">`);
    parts.push(`<h2>${escapeHtml(section.title)}</h2>`);
    for (const paragraph of section.paragraphs) {
      parts.push(`<p data-id="${escapeHtml(paragraph.id)}">`);
      for (const sentence of paragraph.sentences) {
        const cls = sentence.editId === null ? "sentence" : "sentence edited";
        const ref =
          sentence.editId === null
            ? ""
            : ` data-edit="${escapeHtml(sentence.editId)}"`;
        parts.push(
          `<span class="${cls}" data-id="${escapeHtml(sentence.id)}"${ref}>` +
            `${escapeHtml(sentence.text)}</span> `
        );
      }
      parts.push("</p>");
    }
    parts.push("</section>");
  }
  parts.push("</div>");
  return parts.join("\n");
}

/** Render the whole pair as static markup; event wiring happens elsewhere. */
export function renderPair(view: PairView): string {
  const parts: string[] = [
    `<div class="pair" data-pair="${escapeHtml(view.pairId)}">`,
    `<div class="toolbar">revision <span class="revision">${view.revision}</span></div>`,
  ];
  parts.push(renderColumn(view.oldColumn, "old"));
  parts.push(renderColumn(view.newColumn, "new"));
  if (view.empty) {
    parts.push('<div class="empty-state">No edits between these versions.</div>');
  }
  for (const connector of view.connectors) {
    const intents = connector.intents.join(",");
    parts.push(
      `<div class="connector" data-edit="${escapeHtml(connector.editId)}"` +
        ` data-action="${connector.action}" data-intents="${escapeHtml(intents)}"` +
        ` data-validated="${connector.validated}"></div>`
    );
  }
  parts.push("</div>");
  return parts.join("\n");
}
