/** JSON payload shapes mirrored from the annotation service. */

export type Granularity = "section" | "paragraph" | "sentence" | "subsentence";

export type EditAction =
  | "add"
  | "delete"
  | "modify"
  | "merge"
  | "split"
  | "fusion";

export type EditIntent =
  | "grammar"
  | "clarity"
  | "fact_evidence"
  | "claim"
  | "other";

export type Provenance = "auto" | "human" | "llm_assisted";

export interface Sublabel {
  new: string;
  old: string;
  label: "modify" | "identical";
}

export interface Edit {
  id: string;
  new_nodes: string[];
  old_nodes: string[];
  granularity: Granularity;
  action: EditAction;
  sublabels: Sublabel[];
  intents: EditIntent[];
  provenance: Provenance;
}

export interface DocNode {
  id: string;
  granularity: Granularity;
  text: string;
  parent: string | null;
  ordinal: number;
}

/** Response body of GET /pairs/{id} (graph dicts omitted; flat lists suffice). */
export interface PairPayload {
  pair_id: string;
  revision: number;
  edits: Edit[];
  old_nodes: DocNode[];
  new_nodes: DocNode[];
}

/** The mutable slice of a pair payload returned by every accepted write. */
export interface Snapshot {
  pair_id: string;
  revision: number;
  edits: Edit[];
}

export interface PairListing {
  pair_id: string;
  revision: number;
}

export type CorrectionOp =
  | { op: "add_link"; new_node: string; old_node: string }
  | { op: "remove_link"; new_node: string; old_node: string }
  | { op: "set_intent"; edit_id: string; intents: EditIntent[] }
  | {
      op: "set_action_sublabel";
      edit_id: string;
      new_node: string;
      old_node: string;
      label: "modify" | "identical";
    };
