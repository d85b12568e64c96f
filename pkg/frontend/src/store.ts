import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import type { AssessResponse, FieldError, GraphPayload } from "./types.js";

export interface SessionState {
  context: Record<string, string>;
  observed: string[];
  report: AssessResponse | null;
  graph: GraphPayload | null;
  loading: boolean;
  error: FieldError | null;
}

export type Listener = (state: SessionState) => void;

const DEBOUNCE_MS = 150;

// Session state plus the refresh loop: every context/phenomenon change
// schedules one debounced re-assessment; responses are matched against a
// monotonically increasing request id so only the latest one lands.
export class SessionStore {
  private context: Record<string, string> = {};
  private observed = new Set<string>();
  private report: AssessResponse | null = null;
  private graph: GraphPayload | null = null;
  private loading = false;
  private error: FieldError | null = null;

  private listeners: Listener[] = [];
  private requestCounter = 0;
  private latestApplied = 0;
  private readonly scheduleRefresh: Debounced;

  constructor(
    private readonly api: ApiClient,
    debounceMs: number = DEBOUNCE_MS,
  ) {
    this.scheduleRefresh = debounce(() => {
      void this.refreshNow();
    }, debounceMs);
  }

  get state(): SessionState {
    return {
      context: { ...this.context },
      observed: [...this.observed].sort(),
      report: this.report,
      graph: this.graph,
      loading: this.loading,
      error: this.error,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    const snapshot = this.state;
    for (const listener of this.listeners) {
      listener(snapshot);
    }
  }

  configureContext(factor: string, value: string | null): void {
    if (value === null || value === "") {
      delete this.context[factor];
    } else {
      this.context[factor] = value;
    }
    this.notify();
    this.scheduleRefresh();
  }

  clearContext(): void {
    this.context = {};
    this.notify();
    this.scheduleRefresh();
  }

  togglePhenomenon(id: string): void {
    if (this.observed.has(id)) {
      this.observed.delete(id);
    } else {
      this.observed.add(id);
    }
    this.notify();
    this.scheduleRefresh();
  }

  isObserved(id: string): boolean {
    return this.observed.has(id);
  }

  // Issue the assess + graph requests immediately (bypassing the debounce);
  // used for the initial load and by the debounced scheduler.
  async refreshNow(): Promise<void> {
    const requestId = ++this.requestCounter;
    this.loading = true;
    this.notify();
    const observed = [...this.observed].sort();
    try {
      const [report, graph] = await Promise.all([
        this.api.assess({ context: { ...this.context }, observed }),
        this.api.graph(observed),
      ]);
      if (requestId <= this.latestApplied || requestId < this.requestCounter) {
        return; // stale: a newer request has been issued or applied
      }
      this.latestApplied = requestId;
      this.report = report;
      this.graph = graph;
      this.error = null;
      this.loading = false;
      this.notify();
    } catch (err) {
      if (requestId < this.requestCounter) {
        return; // stale failure: a newer request supersedes it
      }
      this.error =
        err instanceof ApiError && err.detail
          ? err.detail
          : { field: "", message: err instanceof Error ? err.message : String(err) };
      this.loading = false;
      this.notify(); // previous report/graph stay on screen
    }
  }
}
