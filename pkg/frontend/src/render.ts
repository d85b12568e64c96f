import type {
  AssessResponse,
  ContextOptions,
  FieldError,
  Phenomenon,
  PosteriorEntry,
} from "./types.js";

// All numbers are displayed with exactly 3 decimals; the underlying
// response values are never modified or re-derived client-side.
export function formatNumber(value: number): string {
  return value.toFixed(3);
}

function labelFor(id: string, labels: Map<string, string>): string {
  return labels.get(id) ?? id;
}

function topEntries(entries: PosteriorEntry[], labels: Map<string, string>): string {
  return entries
    .slice(0, 3)
    .map((e) => `${labelFor(e.id, labels)} (${formatNumber(e.posterior)})`)
    .join(", ");
}

// Risk table: one row per item, in response order (the backend already
// sorts by criticality; the client never re-ranks).
export function renderReport(
  container: HTMLElement,
  report: AssessResponse | null,
  labels: Map<string, string>,
): void {
  container.innerHTML = "";
  if (report === null) {
    return;
  }
  if (report.items.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No problems in the catalog; nothing to assess.";
    container.appendChild(empty);
    return;
  }
  const table = document.createElement("table");
  table.className = "risk-table";
  const head = document.createElement("tr");
  for (const column of ["problem", "criticality", "posterior", "top causes", "top effects"]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const item of report.items) {
    const row = document.createElement("tr");
    row.className = "risk-row";
    row.dataset.problem = item.problem;

    const problem = document.createElement("td");
    problem.className = "problem-cell";
    problem.textContent = labelFor(item.problem, labels);
    row.appendChild(problem);

    const criticality = document.createElement("td");
    const chip = document.createElement("span");
    chip.className = `band-chip band-${item.band}`;
    chip.textContent = formatNumber(item.criticality);
    criticality.appendChild(chip);
    row.appendChild(criticality);

    const posterior = document.createElement("td");
    posterior.className = "posterior-cell";
    const bar = document.createElement("div");
    bar.className = "posterior-bar";
    const fill = document.createElement("div");
    fill.className = "posterior-fill";
    fill.style.width = `${(item.posterior * 100).toFixed(1)}%`;
    bar.appendChild(fill);
    const value = document.createElement("span");
    value.className = "posterior-value";
    value.textContent = formatNumber(item.posterior);
    posterior.appendChild(bar);
    posterior.appendChild(value);
    row.appendChild(posterior);

    const causes = document.createElement("td");
    causes.className = "causes-cell";
    causes.textContent = topEntries(item.contributing_causes, labels);
    row.appendChild(causes);

    const effects = document.createElement("td");
    effects.className = "effects-cell";
    effects.textContent = topEntries(item.predicted_effects, labels);
    row.appendChild(effects);

    table.appendChild(row);
  }
  container.appendChild(table);
}

export function renderContextForm(
  container: HTMLElement,
  options: ContextOptions,
  selected: Record<string, string>,
  onChange: (factor: string, value: string | null) => void,
): void {
  container.innerHTML = "";
  for (const [factor, values] of Object.entries(options)) {
    const field = document.createElement("label");
    field.className = "context-field";
    field.dataset.factor = factor;
    const caption = document.createElement("span");
    caption.textContent = factor.replace(/_/g, " ");
    field.appendChild(caption);
    const select = document.createElement("select");
    const anyOption = document.createElement("option");
    anyOption.value = "";
    anyOption.textContent = "(any)";
    select.appendChild(anyOption);
    for (const value of values) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value.replace(/_/g, " ");
      select.appendChild(option);
    }
    select.value = selected[factor] ?? "";
    select.addEventListener("change", () => {
      onChange(factor, select.value === "" ? null : select.value);
    });
    field.appendChild(select);
    container.appendChild(field);
  }
}

export function renderPhenomenaList(
  container: HTMLElement,
  phenomena: Phenomenon[],
  isObserved: (id: string) => boolean,
  onToggle: (id: string) => void,
): void {
  container.innerHTML = "";
  const groups: Array<[string, Phenomenon[]]> = [
    ["Causes", phenomena.filter((p) => p.kind === "cause")],
    ["Problems", phenomena.filter((p) => p.kind === "problem")],
    ["Effects", phenomena.filter((p) => p.kind === "effect")],
  ];
  for (const [title, group] of groups) {
    if (group.length === 0) {
      continue;
    }
    const heading = document.createElement("h3");
    heading.textContent = title;
    container.appendChild(heading);
    for (const phenomenon of group) {
      const row = document.createElement("label");
      row.className = "phenomenon-row";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.id = phenomenon.id;
      box.checked = isObserved(phenomenon.id);
      box.addEventListener("change", () => onToggle(phenomenon.id));
      row.appendChild(box);
      const text = document.createElement("span");
      text.textContent = phenomenon.label;
      row.appendChild(text);
      container.appendChild(row);
    }
  }
}

export function renderError(container: HTMLElement, error: FieldError | null): void {
  container.innerHTML = "";
  container.classList.toggle("visible", error !== null);
  document
    .querySelectorAll(".context-field.field-error")
    .forEach((el) => el.classList.remove("field-error"));
  if (error === null) {
    return;
  }
  const message = document.createElement("span");
  message.textContent = error.field
    ? `${error.field}: ${error.message}`
    : error.message;
  container.appendChild(message);
  if (error.suggestions && error.suggestions.length) {
    const hint = document.createElement("span");
    hint.className = "error-hint";
    hint.textContent = ` (try: ${error.suggestions.join(", ")})`;
    container.appendChild(hint);
  }
  if (error.field.startsWith("context.")) {
    const factor = error.field.slice("context.".length);
    document
      .querySelector(`.context-field[data-factor="${factor}"]`)
      ?.classList.add("field-error");
  }
}
