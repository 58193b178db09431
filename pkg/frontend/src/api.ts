/** Typed client for the session service.
 *
 * All state of record lives on the service; this client only moves payloads.
 * postResponseReliably retries network failures and resolves duplicate
 * deliveries by asking the service which trial is actually open, so a
 * response is never recorded twice.
 */

import type {
  Choice,
  CreatedSession,
  CreateSessionBody,
  FitReport,
  ResponseAck,
  SessionLogJson,
  TrialDescriptor,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    detail: string,
  ) {
    super(`${kind}: ${detail}`);
  }
}

export type TrialState =
  | { kind: "trial"; trial: TrialDescriptor }
  | { kind: "complete" };

export type FitState =
  | { kind: "fit"; fit: FitReport }
  | { kind: "non-identifiable" };

async function parseError(response: Response): Promise<ApiError> {
  let kind = "http-error";
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) kind = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, kind, detail);
}

export class SessionClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async createSession(body: CreateSessionBody): Promise<CreatedSession> {
    const response = await this.fetchFn(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as CreatedSession;
  }

  async getTrial(sessionId: string): Promise<TrialState> {
    const response = await this.fetchFn(this.url(`/sessions/${sessionId}/trial`));
    if (response.status === 409) {
      const error = await parseError(response);
      if (error.kind === "session-complete") return { kind: "complete" };
      throw error;
    }
    if (!response.ok) throw await parseError(response);
    return { kind: "trial", trial: (await response.json()) as TrialDescriptor };
  }

  async postResponse(
    sessionId: string,
    trialIndex: number,
    choice: Choice,
    rtMs: number | null,
  ): Promise<ResponseAck> {
    const response = await this.fetchFn(this.url(`/sessions/${sessionId}/response`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ trial_index: trialIndex, choice, rt_ms: rtMs }),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ResponseAck;
  }

  /** Post exactly once even across network failures and lost responses. */
  async postResponseReliably(
    sessionId: string,
    trialIndex: number,
    choice: Choice,
    rtMs: number | null,
    options: { attempts?: number; delayMs?: number; onRetry?: (attempt: number) => void } = {},
  ): Promise<void> {
    const attempts = options.attempts ?? 5;
    const delayMs = options.delayMs ?? 250;
    for (let attempt = 0; attempt < attempts; attempt++) {
      try {
        await this.postResponse(sessionId, trialIndex, choice, rtMs);
        return;
      } catch (error) {
        if (error instanceof ApiError && error.kind === "protocol-violation") {
          // the earlier delivery may have landed with its ack lost; trust the
          // service's view of which trial is open
          const state = await this.getTrial(sessionId);
          if (state.kind === "complete" || state.trial.trial_index > trialIndex) return;
          throw error;
        }
        if (error instanceof ApiError) throw error;
        // network failure: visible retry, never a blind duplicate
        options.onRetry?.(attempt + 1);
        if (attempt === attempts - 1) throw error;
        await new Promise((resolve) => setTimeout(resolve, delayMs));
      }
    }
  }

  async getFit(
    sessionId: string,
    options: { link?: string; bootstrap?: number; seed?: number } = {},
  ): Promise<FitState> {
    const params = new URLSearchParams();
    if (options.link) params.set("link", options.link);
    if (options.bootstrap !== undefined) params.set("bootstrap", String(options.bootstrap));
    if (options.seed !== undefined) params.set("seed", String(options.seed));
    const suffix = params.size ? `?${params}` : "";
    const response = await this.fetchFn(this.url(`/sessions/${sessionId}/fit${suffix}`));
    if (response.status === 409) {
      const error = await parseError(response);
      if (error.kind === "non-identifiable") return { kind: "non-identifiable" };
      throw error;
    }
    if (!response.ok) throw await parseError(response);
    return { kind: "fit", fit: (await response.json()) as FitReport };
  }

  async exportLog(sessionId: string): Promise<SessionLogJson> {
    const response = await this.fetchFn(this.url(`/sessions/${sessionId}/export`));
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as SessionLogJson;
  }
}
