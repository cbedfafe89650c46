/** Typed client for the explorer service.
 *
 * Two client-side guarantees the interactive loop relies on:
 *  - identical in-flight requests are deduplicated (one network call, one
 *    shared promise), and
 *  - every logical channel (e.g. "reconstruct") hands out sequence numbers,
 *    so a response that arrives after a newer request on the same channel
 *    has already resolved is reported as stale and dropped by the caller.
 */

import type {
  DecompositionInfo,
  ReconstructionPayload,
  SeriesInfo,
  SummaryPayload,
  WcorPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** Monotonic tickets per channel; a ticket is fresh only while no newer
 * ticket on the same channel has been delivered. */
export class SequenceGate {
  private next = new Map<string, number>();
  private newestDelivered = new Map<string, number>();

  issue(channel: string): number {
    const ticket = (this.next.get(channel) ?? 0) + 1;
    this.next.set(channel, ticket);
    return ticket;
  }

  deliver(channel: string, ticket: number): boolean {
    const newest = this.newestDelivered.get(channel) ?? 0;
    if (ticket < newest) return false;
    this.newestDelivered.set(channel, ticket);
    return true;
  }
}

export interface DecomposeParams {
  L: number;
  d?: number;
  gcv?: number[];
  r?: number;
}

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();
  private gate = new SequenceGate();

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async send<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    let body: unknown = null;
    try {
      body = text ? JSON.parse(text) : null;
    } catch {
      body = null;
    }
    if (!response.ok) {
      const err = (body ?? {}) as { code?: string; message?: string };
      throw new ApiError(
        response.status,
        err.code ?? "error",
        err.message ?? `request failed with status ${response.status}`,
      );
    }
    return body as T;
  }

  /** Deduplicated request: callers issuing the same method+path+body while
   * one is in flight share the original promise. */
  private deduped<T>(method: string, path: string, payload?: string): Promise<T> {
    const key = `${method} ${path} ${payload ?? ""}`;
    const existing = this.inflight.get(key);
    if (existing) return existing as Promise<T>;
    const init: RequestInit = { method };
    if (payload !== undefined) {
      init.body = payload;
      init.headers = { "content-type": "application/json" };
    }
    const request = this.send<T>(path, init).finally(() => {
      this.inflight.delete(key);
    });
    this.inflight.set(key, request);
    return request;
  }

  /** Sequenced variant: resolves null when a newer request on the same
   * channel already delivered (the caller simply skips the render). */
  private async sequenced<T>(
    channel: string,
    method: string,
    path: string,
    payload?: string,
  ): Promise<T | null> {
    const ticket = this.gate.issue(channel);
    const result = await this.deduped<T>(method, path, payload);
    return this.gate.deliver(channel, ticket) ? result : null;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.deduped("GET", "/api/v1/health");
  }

  uploadSeries(csvText: string): Promise<SeriesInfo> {
    return this.send<SeriesInfo>("/api/v1/series", {
      method: "POST",
      body: csvText,
      headers: { "content-type": "text/csv" },
    });
  }

  decompose(seriesId: string, params: DecomposeParams): Promise<DecompositionInfo> {
    return this.deduped(
      "POST",
      `/api/v1/series/${seriesId}/decompose`,
      JSON.stringify(params),
    );
  }

  summary(decompositionId: string, gridPoints = 200): Promise<SummaryPayload> {
    return this.deduped(
      "GET",
      `/api/v1/decompositions/${decompositionId}/summary?grid=${gridPoints}`,
    );
  }

  reconstruct(
    decompositionId: string,
    groups: number[][],
  ): Promise<ReconstructionPayload | null> {
    return this.sequenced(
      "reconstruct",
      "POST",
      `/api/v1/decompositions/${decompositionId}/reconstruct`,
      JSON.stringify({ groups }),
    );
  }

  wcor(decompositionId: string, groups: number[][]): Promise<WcorPayload | null> {
    return this.sequenced(
      "wcor",
      "POST",
      `/api/v1/decompositions/${decompositionId}/wcor`,
      JSON.stringify({ groups }),
    );
  }
}
