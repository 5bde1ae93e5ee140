/**
 * Typed client for the mgl session service. Every method maps 1:1 to an HTTP
 * endpoint; the UI layers no extra semantics on top, so any action sequence
 * can be replayed by a scripted client.
 */

export interface Prediction {
  categories: string[];
  matched_rules: string[];
  warning: string | null;
}

export interface LabelOutcome {
  already_covered: boolean;
  new_hypothesis: string[] | null;
  failure_reason: string | null;
}

export interface HistoryRecord {
  kind: "predict" | "label";
  text: string;
  label: string | null;
  learned_rules: string[];
  timestamp: number;
  note: string;
}

export type RulesByCategory = Record<string, string[]>;

/** Server rejected the request (HTTP error or ok:false payload). */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly code: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Transport-level failure: server unreachable or response unreadable. */
export class ConnectionError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConnectionError";
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ConnectionError(`cannot reach the session service: ${String(err)}`);
    }
    let payload: { ok?: boolean; error?: { code?: string; message?: string } };
    try {
      payload = await response.json();
    } catch {
      throw new ConnectionError(`unreadable response (HTTP ${response.status})`);
    }
    if (!response.ok || payload.ok !== true) {
      throw new ApiError(
        payload.error?.message ?? `HTTP ${response.status}`,
        payload.error?.code ?? "http_error",
      );
    }
    return payload as T;
  }

  async submitTask(text: string): Promise<Prediction> {
    const body = await this.request<{ prediction: Prediction }>(
      "POST",
      "/api/tasks",
      { text },
    );
    return body.prediction;
  }

  async submitLabel(text: string, category: string): Promise<LabelOutcome> {
    return this.request<LabelOutcome>("POST", "/api/labels", { text, category });
  }

  async getRules(): Promise<RulesByCategory> {
    const body = await this.request<{ rules: RulesByCategory }>("GET", "/api/rules");
    return body.rules;
  }

  async getHistory(): Promise<HistoryRecord[]> {
    const body = await this.request<{ records: HistoryRecord[] }>(
      "GET",
      "/api/history",
    );
    return body.records;
  }

  async resetSession(): Promise<void> {
    await this.request<{ ok: true }>("DELETE", "/api/session");
  }
}
