/** Client-side state for one pair: revision tracking and optimistic writes.
 *
 * A write optimistically applies label ops to the local edit list, then
 * posts the batch. On 200 the server snapshot is adopted (so the displayed
 * revision always equals the server revision after an accepted write). On
 * 409 the optimistic change is rolled back and the current server state
 * carried in the conflict body replaces it. On 422 the optimistic change
 * is rolled back and the previous state is kept.
 */

import type { ApiClient, WriteResult } from "./api.js";
import type {
  CorrectionOp,
  Edit,
  EditIntent,
  PairPayload,
  Snapshot,
} from "./types.js";

export interface StoreState {
  payload: PairPayload | null;
  edits: Edit[];
  revision: number;
  /** true while a write is in flight (one in-flight write per pair). */
  pending: boolean;
  /** user-facing message after a conflict or rejection, null when clear. */
  banner: string | null;
}

export type SubmitOutcome = "accepted" | "conflict" | "rejected";

export class PairStore {
  private state: StoreState = {
    payload: null,
    edits: [],
    revision: 0,
    pending: false,
    banner: null,
  };
  private listeners: Array<(s: StoreState) => void> = [];

  constructor(private readonly api: ApiClient) {}

  getState(): StoreState {
    return this.state;
  }

  subscribe(listener: (s: StoreState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private setState(patch: Partial<StoreState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  async load(pairId: string): Promise<void> {
    const payload = await this.api.getPair(pairId);
    this.setState({
      payload,
      edits: payload.edits,
      revision: payload.revision,
      banner: null,
    });
  }

  /** Convenience wrapper: relabel one edit's intent. */
  async setIntent(editId: string, intents: EditIntent[]): Promise<SubmitOutcome> {
    return this.submit([{ op: "set_intent", edit_id: editId, intents }]);
  }

  async submit(ops: CorrectionOp[]): Promise<SubmitOutcome> {
    const payload = this.state.payload;
    if (payload === null) {
      throw new Error("no pair loaded");
    }
    if (this.state.pending) {
      throw new Error("a write is already in flight for this pair");
    }
    const saved = this.state.edits;
    this.setState({
      pending: true,
      banner: null,
      edits: applyOptimistic(saved, ops),
    });
    let result: WriteResult;
    try {
      result = await this.api.postCorrections(
        payload.pair_id,
        this.state.revision,
        ops
      );
    } catch (err) {
      this.setState({ pending: false, edits: saved, banner: String(err) });
      return "rejected";
    }
    switch (result.kind) {
      case "ok":
        this.adopt(result.snapshot);
        return "accepted";
      case "conflict":
        // roll back, then refresh from the server state in the 409 body
        this.setState({ edits: saved });
        this.adopt(result.snapshot, "pair changed on the server; reloaded");
        return "conflict";
      case "rejected":
        this.setState({ pending: false, edits: saved, banner: result.error });
        return "rejected";
    }
  }

  private adopt(snapshot: Snapshot, banner: string | null = null): void {
    const payload = this.state.payload;
    this.setState({
      payload: payload ? { ...payload, ...snapshot } : payload,
      edits: snapshot.edits,
      revision: snapshot.revision,
      pending: false,
      banner,
    });
  }
}

/** Apply label ops locally; structural ops wait for the server's answer. */
export function applyOptimistic(edits: Edit[], ops: CorrectionOp[]): Edit[] {
  let result = edits;
  for (const op of ops) {
    if (op.op === "set_intent") {
      result = result.map((e) =>
        e.id === op.edit_id ? { ...e, intents: [...op.intents].sort() } : e
      );
    } else if (op.op === "set_action_sublabel") {
      result = result.map((e) =>
        e.id === op.edit_id
          ? {
              ...e,
              sublabels: e.sublabels.map((s) =>
                s.new === op.new_node && s.old === op.old_node
                  ? { ...s, label: op.label }
                  : s
              ),
            }
          : e
      );
    }
    // add_link / remove_link re-partition the edit set server-side; the
    // local list is left as-is until the authoritative snapshot arrives.
  }
  return result;
}
