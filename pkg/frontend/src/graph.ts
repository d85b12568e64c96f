import type { GraphPayload } from "./types.js";

interface BodyNode {
  id: string;
  kind: string;
  highlight: boolean;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

const SVG_NS = "http://www.w3.org/2000/svg";

const KIND_COLUMN: Record<string, number> = { cause: 0.15, problem: 0.5, effect: 0.85 };

// Small deterministic force layout: repulsion between all nodes, springs
// along edges, and a pull towards the node's kind column, run for a fixed
// number of iterations. Highlighted nodes get the same treatment as the
// DOT export: filled with the highlight color.
export function layoutGraph(
  payload: GraphPayload,
  width: number,
  height: number,
  iterations = 250,
): BodyNode[] {
  const bodies: BodyNode[] = payload.nodes.map((node, index) => {
    const column = KIND_COLUMN[node.kind] ?? 0.5;
    // deterministic pseudo-random scatter from the node index
    const jitter = Math.sin((index + 1) * 12.9898) * 0.5;
    return {
      id: node.id,
      kind: node.kind,
      highlight: node.highlight,
      x: column * width + jitter * 40,
      y: ((index + 0.5) / payload.nodes.length) * height,
      vx: 0,
      vy: 0,
    };
  });
  const byId = new Map(bodies.map((b) => [b.id, b]));
  const springLength = Math.min(width, height) / 4;

  for (let step = 0; step < iterations; step++) {
    const damping = 0.85;
    const temperature = 1 - step / iterations;
    for (const a of bodies) {
      for (const b of bodies) {
        if (a === b) {
          continue;
        }
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const squared = Math.max(dx * dx + dy * dy, 25);
        const force = 2000 / squared;
        const distance = Math.sqrt(squared);
        a.vx += (dx / distance) * force;
        a.vy += (dy / distance) * force;
      }
    }
    for (const edge of payload.edges) {
      const source = byId.get(edge.source);
      const target = byId.get(edge.target);
      if (!source || !target) {
        continue;
      }
      const dx = target.x - source.x;
      const dy = target.y - source.y;
      const distance = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const stretch = (distance - springLength) * 0.02;
      source.vx += (dx / distance) * stretch;
      source.vy += (dy / distance) * stretch;
      target.vx -= (dx / distance) * stretch;
      target.vy -= (dy / distance) * stretch;
    }
    for (const body of bodies) {
      const column = (KIND_COLUMN[body.kind] ?? 0.5) * width;
      body.vx += (column - body.x) * 0.03;
      body.vy += (height / 2 - body.y) * 0.005;
      body.x += body.vx * damping * temperature;
      body.y += body.vy * damping * temperature;
      body.vx *= damping;
      body.vy *= damping;
      body.x = Math.min(Math.max(body.x, 20), width - 20);
      body.y = Math.min(Math.max(body.y, 20), height - 20);
    }
  }
  return bodies;
}

export function renderGraph(
  container: HTMLElement,
  payload: GraphPayload | null,
  labels: Map<string, string>,
  width = 860,
  height = 520,
): void {
  container.innerHTML = "";
  if (payload === null || payload.nodes.length === 0) {
    return;
  }
  const bodies = layoutGraph(payload, width, height);
  const byId = new Map(bodies.map((b) => [b.id, b]));

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "cegraph");

  const maxWeight = Math.max(...payload.edges.map((e) => e.weight), 1);
  for (const edge of payload.edges) {
    const source = byId.get(edge.source);
    const target = byId.get(edge.target);
    if (!source || !target) {
      continue;
    }
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", source.x.toFixed(1));
    line.setAttribute("y1", source.y.toFixed(1));
    line.setAttribute("x2", target.x.toFixed(1));
    line.setAttribute("y2", target.y.toFixed(1));
    line.setAttribute("class", "cegraph-edge");
    line.setAttribute(
      "stroke-width",
      (0.5 + 2.5 * (edge.weight / maxWeight)).toFixed(2),
    );
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${edge.source} -> ${edge.target} (${edge.weight})`;
    line.appendChild(title);
    svg.appendChild(line);
  }

  for (const body of bodies) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute(
      "class",
      `cegraph-node kind-${body.kind}${body.highlight ? " highlight" : ""}`,
    );
    group.setAttribute("data-id", body.id);
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", body.x.toFixed(1));
    circle.setAttribute("cy", body.y.toFixed(1));
    circle.setAttribute("r", body.highlight ? "9" : "6");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = labels.get(body.id) ?? body.id;
    circle.appendChild(title);
    group.appendChild(circle);
    if (body.highlight) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", (body.x + 11).toFixed(1));
      text.setAttribute("y", (body.y + 4).toFixed(1));
      text.textContent = labels.get(body.id) ?? body.id;
      group.appendChild(text);
    }
    svg.appendChild(group);
  }
  container.appendChild(svg);
}
