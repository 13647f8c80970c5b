/**
 * Typed client for the /v1 API. The dashboard holds no authoritative
 * state: every displayed fact is a response from these routes.
 */

import { buildEventEnvelope, SigningKey, TxArgs } from "./signing.js";

export interface CaseDoc {
  caseId: number;
  name: string;
  description: string;
  responsible: string;
  globalId: string;
  createdAtMs: number;
  caseHash: string;
  status: string;
  investigators: string[];
  eventIds: number[];
}

export interface CustodyHop {
  owner: string;
  timestampMs: number;
}

export interface EventDoc {
  eventId: number;
  caseId: number;
  type: string;
  description: string;
  status: string;
  evidenceHash: string;
  createdAtMs: number;
  custody: CustodyHop[];
}

export interface MetaDoc {
  caseStatuses: string[];
  eventStatuses: string[];
  eventTypes: string[];
  roles: string[];
  adminKey: string;
}

export interface VerifyDoc {
  ok: boolean;
  blocks: number;
  firstBadHeight?: number;
  failureKind?: string;
}

export interface SubmitReceipt {
  txId: string;
  height: number;
  blockHash: string;
  eventId?: number;
  result?: number;
  alertSeq?: number;
}

export class ApiError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private lastNonce = 0;

  constructor(private baseUrl: string = "",
              private fetchImpl: FetchLike = (input, init) => fetch(input, init)) {}

  private nextNonce(): number {
    // millisecond wall clock stretched to stay strictly increasing
    const nonce = Math.max(Date.now() * 1000, this.lastNonce + 1);
    this.lastNonce = nonce;
    return nonce;
  }

  private async request(method: string, path: string, init: RequestInit = {}): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, { method, ...init });
    if (!response.ok) {
      let code = "InternalError";
      let message = response.statusText;
      try {
        const doc = await response.json();
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(code, message, response.status);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request("GET", path)).json() as Promise<T>;
  }

  stats(): Promise<{ cases: number; events: number }> {
    return this.getJson("/v1/stats");
  }

  listCases(): Promise<{ count: number; cases: CaseDoc[] }> {
    return this.getJson("/v1/cases");
  }

  getCase(caseId: number): Promise<CaseDoc> {
    return this.getJson(`/v1/cases/${caseId}`);
  }

  listCaseEvents(caseId: number): Promise<{ count: number; events: EventDoc[] }> {
    return this.getJson(`/v1/cases/${caseId}/events`);
  }

  getEvent(eventId: number): Promise<EventDoc> {
    return this.getJson(`/v1/events/${eventId}`);
  }

  meta(): Promise<MetaDoc> {
    return this.getJson("/v1/meta");
  }

  verify(): Promise<VerifyDoc> {
    return this.getJson("/v1/verify");
  }

  async putEvidence(content: Uint8Array): Promise<{ digest: string; length: number }> {
    const response = await this.request("POST", "/v1/evidence", {
      body: content as BodyInit,
      headers: { "content-type": "application/octet-stream" },
    });
    return response.json();
  }

  /** Sign and post an f12 event; the server assigns the dense eventId. */
  async submitEvent(key: SigningKey, args: TxArgs, timestampMs: number): Promise<SubmitReceipt> {
    const path = `/v1/cases/${args.caseId}/events`;
    const envelope = await buildEventEnvelope(key, path, args, timestampMs,
      this.nextNonce());
    const response = await this.request("POST", path, {
      body: JSON.stringify(envelope),
      headers: { "content-type": "application/json" },
    });
    return response.json();
  }
}
