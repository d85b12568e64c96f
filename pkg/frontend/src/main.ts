import { ApiClient } from "./api.js";
import { renderGraph } from "./graph.js";
import {
  renderContextForm,
  renderError,
  renderPhenomenaList,
  renderReport,
} from "./render.js";
import { SessionStore } from "./store.js";

declare global {
  interface Window {
    RERISK_API?: string;
  }
}

function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? window.RERISK_API ?? "http://127.0.0.1:8000";
}

function requireElement(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing #${id} container`);
  }
  return element;
}

export async function bootstrap(): Promise<void> {
  const api = new ApiClient(resolveBaseUrl());
  const store = new SessionStore(api);

  const contextContainer = requireElement("context-form");
  const phenomenaContainer = requireElement("phenomena-list");
  const reportContainer = requireElement("risk-report");
  const graphContainer = requireElement("graph-view");
  const errorBanner = requireElement("error-banner");
  const spinner = requireElement("spinner");
  const clearButton = requireElement("clear-context");

  const [phenomena, contextOptions] = await Promise.all([
    api.getPhenomena(),
    api.getContextOptions(),
  ]);
  const labels = new Map(phenomena.map((p) => [p.id, p.label]));

  store.subscribe((state) => {
    spinner.classList.toggle("visible", state.loading);
    renderError(errorBanner, state.error);
    renderReport(reportContainer, state.report, labels);
    renderGraph(graphContainer, state.graph, labels);
    renderContextForm(contextContainer, contextOptions, state.context, (factor, value) =>
      store.configureContext(factor, value),
    );
    renderPhenomenaList(
      phenomenaContainer,
      phenomena,
      (id) => state.observed.includes(id),
      (id) => store.togglePhenomenon(id),
    );
  });

  clearButton.addEventListener("click", () => store.clearContext());

  renderContextForm(contextContainer, contextOptions, {}, (factor, value) =>
    store.configureContext(factor, value),
  );
  renderPhenomenaList(
    phenomenaContainer,
    phenomena,
    (id) => store.isObserved(id),
    (id) => store.togglePhenomenon(id),
  );
  await store.refreshNow();
}

if (typeof document !== "undefined" && document.getElementById("risk-report")) {
  void bootstrap();
}
