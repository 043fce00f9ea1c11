/**
 * Fetch client for the srgtools JSON API plus the per-panel request
 * channel. The console keeps at most one request in flight per panel;
 * edits made while a request is pending supersede it, and a response
 * whose sequence number is no longer current is discarded unseen.
 */

import type {
  ApiErrorDoc,
  HealthDoc,
  MarginReport,
  MarginRequest,
  SampleRequest,
  SensitivityDoc,
  SensitivityRequest,
  SrgBoundDoc,
  SrgRequest,
  SrgSampleDoc,
} from "./schema.js";

export class ApiError extends Error {
  readonly status: number;
  readonly doc: ApiErrorDoc | null;

  constructor(status: number, doc: ApiErrorDoc | null) {
    const detail = doc ? `${doc.error.code}: ${doc.error.message}` : `HTTP ${status}`;
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.doc = doc;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SrgApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (...a) => fetch(...a)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  async health(): Promise<HealthDoc> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/health`);
    return (await resp.json()) as HealthDoc;
  }

  srg(body: SrgRequest): Promise<SrgBoundDoc> {
    return this.post<SrgBoundDoc>("/api/srg", body);
  }

  margin(body: MarginRequest): Promise<MarginReport> {
    return this.post<MarginReport>("/api/margin", body);
  }

  sensitivity(body: SensitivityRequest): Promise<SensitivityDoc> {
    return this.post<SensitivityDoc>("/api/sensitivity", body);
  }

  sample(body: SampleRequest): Promise<SrgSampleDoc> {
    return this.post<SrgSampleDoc>("/api/sample", body);
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      let doc: ApiErrorDoc | null = null;
      try {
        doc = (await resp.json()) as ApiErrorDoc;
      } catch {
        doc = null;
      }
      throw new ApiError(resp.status, doc);
    }
    return (await resp.json()) as T;
  }
}

/**
 * Serializes requests for one display panel.
 *
 * `submit` stamps each request with a fresh sequence number and remembers
 * only the newest; the pump sends one request at a time. A response is
 * applied only if its request is still the newest ever submitted, so a
 * burst of edits lands exactly one view update, from the final state.
 */
export class PanelChannel<TReq, TRes> {
  private seq = 0;
  private busy = false;
  private pending: { seq: number; req: TReq } | null = null;

  constructor(
    private readonly send: (req: TReq) => Promise<TRes>,
    private readonly apply: (res: TRes, req: TReq) => void,
    private readonly fail: (err: unknown, req: TReq) => void = () => {},
  ) {}

  /** Queue a request, superseding any not-yet-sent one. Returns its sequence number. */
  submit(req: TReq): number {
    this.seq += 1;
    this.pending = { seq: this.seq, req };
    void this.pump();
    return this.seq;
  }

  get inFlight(): boolean {
    return this.busy;
  }

  private async pump(): Promise<void> {
    if (this.busy || this.pending === null) {
      return;
    }
    const job = this.pending;
    this.pending = null;
    this.busy = true;
    try {
      const res = await this.send(job.req);
      if (job.seq === this.seq) {
        this.apply(res, job.req);
      }
      // else: superseded while in flight; the stale payload is dropped
    } catch (err) {
      if (job.seq === this.seq) {
        this.fail(err, job.req);
      }
    } finally {
      this.busy = false;
      void this.pump();
    }
  }
}
