/** Shared fixture: one pair with four sentences per side and three edits
 * (modify, add, delete); the fourth sentence is identical in both versions
 * and belongs to no edit. */

import type { DocNode, Edit, PairPayload } from "../src/types.js";

function docNodes(version: "old" | "new", sentences: string[]): DocNode[] {
  const doc = `d1:${version}`;
  const nodes: DocNode[] = [
    { id: `${doc}:root`, granularity: "section", text: "", parent: null, ordinal: 0 },
    {
      id: `${doc}:root/sec0`,
      granularity: "section",
      text: "Introduction",
      parent: `${doc}:root`,
      ordinal: 0,
    },
    {
      id: `${doc}:root/sec0/sec0.p0`,
      granularity: "paragraph",
      text: sentences.join(" "),
      parent: `${doc}:root/sec0`,
      ordinal: 0,
    },
  ];
  sentences.forEach((text, i) => {
    nodes.push({
      id: `${doc}:root/sec0/sec0.p0/sec0.p0.s${i}`,
      granularity: "sentence",
      text,
      parent: `${doc}:root/sec0/sec0.p0`,
      ordinal: i,
    });
  });
  return nodes;
}

export function sid(version: "old" | "new", i: number): string {
  return `d1:${version}:root/sec0/sec0.p0/sec0.p0.s${i}`;
}

export function fixtureEdits(): Edit[] {
  return [
    {
      id: "e:aaaaaaaaaaaa",
      new_nodes: [sid("new", 0)],
      old_nodes: [sid("old", 0)],
      granularity: "sentence",
      action: "modify",
      sublabels: [],
      intents: ["clarity"],
      provenance: "auto",
    },
    {
      id: "e:bbbbbbbbbbbb",
      new_nodes: [sid("new", 1)],
      old_nodes: [],
      granularity: "sentence",
      action: "add",
      sublabels: [],
      intents: [],
      provenance: "auto",
    },
    {
      id: "e:cccccccccccc",
      new_nodes: [],
      old_nodes: [sid("old", 1)],
      granularity: "sentence",
      action: "delete",
      sublabels: [],
      intents: [],
      provenance: "human",
    },
  ];
}

export function fixturePair(): PairPayload {
  return {
    pair_id: "p1",
    revision: 0,
    edits: fixtureEdits(),
    old_nodes: docNodes("old", [
      "The method works fine.",
      "See the appendix for proofs.",
      "We thank the reviewers.",
      "Code will be released.",
    ]),
    new_nodes: docNodes("new", [
      "The method works very well.",
      "An ablation study was added.",
      "We thank the reviewers.",
      "Code will be released.",
    ]),
  };
}
