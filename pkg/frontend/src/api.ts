/** Typed client for the service's REST surface. */

import type {
  FeedbackItem,
  MarkDoc,
  ScreenplayDoc,
  SessionExport,
  StepEventData,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface ApiOptions {
  baseUrl?: string;
  fetchFn?: typeof fetch;
}

async function parseError(resp: Response): Promise<ApiError> {
  try {
    const body = (await resp.json()) as { code?: string; message?: string };
    return new ApiError(resp.status, body.code ?? "error", body.message ?? resp.statusText);
  } catch {
    return new ApiError(resp.status, "error", resp.statusText);
  }
}

export class Api {
  private baseUrl: string;
  private fetchFn: typeof fetch;

  constructor(options: ApiOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  uploadScreenplay(payload: {
    title: string;
    body: string;
    bios?: string;
    outline?: string;
  }): Promise<{ id: string }> {
    return this.request("POST", "/screenplays", payload);
  }

  getScreenplay(id: string): Promise<ScreenplayDoc> {
    return this.request("GET", `/screenplays/${id}`);
  }

  createSession(
    screenplayId: string,
    mode: string,
    activated: string[],
  ): Promise<{ id: string }> {
    return this.request("POST", "/sessions", {
      screenplay_id: screenplayId,
      mode,
      activated,
    });
  }

  step(sessionId: string): Promise<StepEventData> {
    return this.request("POST", `/sessions/${sessionId}/step`);
  }

  finishScene(sessionId: string): Promise<FeedbackItem[]> {
    return this.request("POST", `/sessions/${sessionId}/finish-scene`);
  }

  mark(sessionId: string, targetId: string): Promise<MarkDoc> {
    return this.request("POST", `/sessions/${sessionId}/marks`, { target_id: targetId });
  }

  getMarks(sessionId: string): Promise<Record<string, unknown>[]> {
    return this.request("GET", `/sessions/${sessionId}/marks`);
  }

  getExport(sessionId: string): Promise<SessionExport> {
    return this.request("GET", `/sessions/${sessionId}/export`);
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/events`;
  }
}
