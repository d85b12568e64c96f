import type { ApiClient, AssessRequest } from "../src/api.js";
import type { AssessResponse, GraphPayload, RiskItem } from "../src/types.js";

export function makeItem(overrides: Partial<RiskItem> = {}): RiskItem {
  return {
    problem: "incomplete-hidden-requirements",
    posterior: 0.478,
    criticality: 0.22855109264389042,
    band: "high",
    contributing_causes: [{ id: "missing-domain-knowledge", posterior: 0.42 }],
    predicted_effects: [{ id: "additional-rework", posterior: 0.31 }],
    ...overrides,
  };
}

export function makeResponse(
  items: RiskItem[],
  observed: string[] = [],
): AssessResponse {
  return {
    format: "rerisk-report/1",
    context: {},
    observed,
    dataset: { n: 228, hash: "sha256:test" },
    thresholds: { low_max: 0.05, high_min: 0.2 },
    items,
  };
}

export const EMPTY_GRAPH: GraphPayload = { nodes: [], edges: [] };

export interface FakeApi extends ApiClient {
  assessCalls: AssessRequest[];
  graphCalls: string[][];
}

// Fake client whose assess response depends on the observed set, so
// toggle-on/off round trips reproduce the initial payload.
export function fakeApi(
  respond: (request: AssessRequest) => AssessResponse,
): FakeApi {
  const api = {
    assessCalls: [] as AssessRequest[],
    graphCalls: [] as string[][],
    getPhenomena: () => Promise.resolve([]),
    getContextOptions: () => Promise.resolve({}),
    assess(request: AssessRequest) {
      api.assessCalls.push(request);
      return Promise.resolve(respond(request));
    },
    graph(highlight: string[]) {
      api.graphCalls.push(highlight);
      return Promise.resolve(EMPTY_GRAPH);
    },
  };
  return api as unknown as FakeApi;
}
