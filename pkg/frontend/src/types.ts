// Payload shapes of the /api endpoints. The UI never computes
// probabilities or criticalities; it only displays these fields.

export interface Phenomenon {
  id: string;
  kind: "cause" | "problem" | "effect";
  label: string;
  category: string | null;
}

export type ContextOptions = Record<string, string[]>;

export interface PosteriorEntry {
  id: string;
  posterior: number;
}

export type BandName = "low" | "medium" | "high";

export interface RiskItem {
  problem: string;
  posterior: number;
  criticality: number;
  band: BandName;
  contributing_causes: PosteriorEntry[];
  predicted_effects: PosteriorEntry[];
}

export interface AssessResponse {
  format: string;
  context: Record<string, string>;
  observed: string[];
  dataset: { n: number; hash: string };
  thresholds: { low_max: number; high_min: number };
  items: RiskItem[];
}

export interface GraphNode {
  id: string;
  kind: string;
  highlight: boolean;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
}

export interface GraphPayload {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface FieldError {
  field: string;
  message: string;
  suggestions?: string[];
}
