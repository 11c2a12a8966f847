/** Wire types of the prediction service; field names mirror the JSON exactly. */

export type MethodTag = "xmt" | "txmt";

export interface ItemEntry {
  item: string;
  f: number;
}

export interface Breakdown {
  f: number;
  tau: number;
  sigma: number;
  kappa: number;
  psi: number;
  omega: number;
  map: number;
  tmap: number;
}

export interface ExplanationLine {
  kind: "recency" | "seasonal" | "copurchase" | "tars" | "repurchase";
  text: string;
  values: Record<string, unknown>;
}

export interface PredictionPayload {
  customer_id: string;
  at: string;
  method: string;
  k: number;
  basket: string[];
  forgotten: string[];
  predicted_basket: string[];
  breakdowns?: Record<string, Breakdown>;
  explanations?: Record<string, ExplanationLine[]>;
  config: Record<string, unknown>;
}

export interface UnknownItemsError {
  detail: string;
  unknown_items: string[];
}

/** Throws when a payload does not carry the fields the UI renders. */
export function assertPredictionPayload(data: unknown): PredictionPayload {
  const p = data as PredictionPayload;
  if (
    typeof p !== "object" ||
    p === null ||
    typeof p.customer_id !== "string" ||
    !Array.isArray(p.forgotten) ||
    !Array.isArray(p.basket) ||
    typeof p.method !== "string" ||
    typeof p.k !== "number"
  ) {
    throw new Error("prediction payload does not match the service schema");
  }
  return p;
}
