import type {
  Bundle,
  ConfigBody,
  SessionInfo,
  TransformBody,
  TransformName,
  WhatifResponse,
} from "./types.js";

/** Error raised for non-2xx responses; carries the service's error name so
 * views can surface it verbatim. */
export class ApiError extends Error {
  constructor(
    public readonly name: string,
    public readonly detail: string,
    public readonly status: number,
  ) {
    super(`${name}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private advertised: Set<string> | null = null;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let name = `HTTP ${response.status}`;
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        if (body.error) name = body.error;
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the HTTP status text
      }
      throw new ApiError(name, detail, response.status);
    }
    return (await response.json()) as T;
  }

  async advertisedTransforms(): Promise<Set<string>> {
    if (this.advertised === null) {
      const doc = await this.request<{ transforms: string[] }>("/transforms");
      this.advertised = new Set(doc.transforms);
    }
    return this.advertised;
  }

  async createSession(csv: string, schemaJson: string): Promise<SessionInfo> {
    const form = new FormData();
    form.append("data", new Blob([csv], { type: "text/csv" }), "data.csv");
    form.append(
      "schema",
      new Blob([schemaJson], { type: "application/json" }),
      "schema.json",
    );
    return this.request<SessionInfo>("/sessions", { method: "POST", body: form });
  }

  async setConfig(sessionId: string, config: ConfigBody): Promise<unknown> {
    return this.request(`/sessions/${sessionId}/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  async analyze(sessionId: string): Promise<Bundle> {
    return this.request<Bundle>(`/sessions/${sessionId}/analyze`, {
      method: "POST",
    });
  }

  async report(sessionId: string): Promise<Bundle> {
    return this.request<Bundle>(`/sessions/${sessionId}/report`);
  }

  /** Preview (commit=false) or apply (commit=true) one transform. Only
   * transforms the service advertises are ever sent. */
  async whatif(
    sessionId: string,
    transform: TransformBody,
    commit: boolean,
  ): Promise<WhatifResponse> {
    const names = Object.keys(transform) as TransformName[];
    if (names.length !== 1) {
      throw new ApiError(
        "InvalidTransform",
        `exactly one transform expected, got [${names.join(", ")}]`,
        0,
      );
    }
    const advertised = await this.advertisedTransforms();
    if (!advertised.has(names[0])) {
      throw new ApiError(
        "InvalidTransform",
        `transform "${names[0]}" is not advertised by the service`,
        0,
      );
    }
    return this.request<WhatifResponse>(`/sessions/${sessionId}/whatif`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...transform, commit }),
    });
  }

  async undo(sessionId: string): Promise<{ history_depth: number }> {
    return this.request(`/sessions/${sessionId}/undo`, { method: "POST" });
  }

  async deleteSession(sessionId: string): Promise<unknown> {
    return this.request(`/sessions/${sessionId}`, { method: "DELETE" });
  }
}
