/** Thin typed client over the service HTTP API.
 *
 * The fetch implementation is injectable so tests can run against a fake
 * server without any network or DOM environment.
 */

import type {
  CorrectionOp,
  EditIntent,
  PairListing,
  PairPayload,
  Snapshot,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<{ status: number; json(): Promise<unknown> }>;

export type WriteResult =
  | { kind: "ok"; snapshot: Snapshot }
  | { kind: "conflict"; snapshot: Snapshot; error: string }
  | { kind: "rejected"; error: string; position?: number };

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly baseUrl: string = ""
  ) {}

  async listPairs(): Promise<PairListing[]> {
    const res = await this.fetchImpl(`${this.baseUrl}/pairs`);
    if (res.status !== 200) {
      throw new ApiError(res.status, `listing pairs failed (${res.status})`);
    }
    return (await res.json()) as PairListing[];
  }

  async getPair(pairId: string): Promise<PairPayload> {
    const res = await this.fetchImpl(`${this.baseUrl}/pairs/${pairId}`);
    if (res.status !== 200) {
      throw new ApiError(res.status, `pair ${pairId} unavailable (${res.status})`);
    }
    return (await res.json()) as PairPayload;
  }

  async postCorrections(
    pairId: string,
    expectedRevision: number,
    ops: CorrectionOp[]
  ): Promise<WriteResult> {
    return this.write(`${this.baseUrl}/pairs/${pairId}/corrections`, {
      expected_revision: expectedRevision,
      ops,
    });
  }

  async postLabels(
    pairId: string,
    expectedRevision: number,
    editId: string,
    intents: EditIntent[]
  ): Promise<WriteResult> {
    return this.write(`${this.baseUrl}/pairs/${pairId}/labels`, {
      expected_revision: expectedRevision,
      edit_id: editId,
      intents,
    });
  }

  private async write(url: string, payload: unknown): Promise<WriteResult> {
    const res = await this.fetchImpl(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = (await res.json()) as Record<string, unknown>;
    if (res.status === 200) {
      return { kind: "ok", snapshot: body as unknown as Snapshot };
    }
    if (res.status === 409) {
      return {
        kind: "conflict",
        snapshot: body as unknown as Snapshot,
        error: String(body.error ?? "stale revision"),
      };
    }
    return {
      kind: "rejected",
      error: String(body.error ?? `write failed (${res.status})`),
      position: typeof body.position === "number" ? body.position : undefined,
    };
  }
}
