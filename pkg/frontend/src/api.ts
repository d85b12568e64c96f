import type {
  AssessResponse,
  ContextOptions,
  FieldError,
  GraphPayload,
  Phenomenon,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: FieldError | null;

  constructor(status: number, detail: FieldError | null) {
    super(detail ? `${detail.field}: ${detail.message}` : `HTTP ${status}`);
    this.status = status;
    this.detail = detail;
  }
}

async function expectOk<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let detail: FieldError | null = null;
  try {
    const body = await response.json();
    if (body && typeof body === "object" && "error" in body) {
      detail = (body as { error: FieldError }).error;
    }
  } catch {
    // non-JSON error body; keep the bare status
  }
  throw new ApiError(response.status, detail);
}

export interface AssessRequest {
  context: Record<string, string>;
  observed: string[];
}

// Thin typed client over the backend; base URL is configurable so the UI
// can point at any rerisk serve instance.
export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  getPhenomena(): Promise<Phenomenon[]> {
    return fetch(`${this.baseUrl}/api/phenomena`).then((r) => expectOk(r));
  }

  getContextOptions(): Promise<ContextOptions> {
    return fetch(`${this.baseUrl}/api/context-options`).then((r) => expectOk(r));
  }

  assess(request: AssessRequest): Promise<AssessResponse> {
    return fetch(`${this.baseUrl}/api/assess`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }).then((r) => expectOk(r));
  }

  graph(highlight: string[]): Promise<GraphPayload> {
    const query = highlight.length
      ? `?highlight=${encodeURIComponent(highlight.join(","))}`
      : "";
    return fetch(`${this.baseUrl}/api/graph${query}`).then((r) => expectOk(r));
  }
}
