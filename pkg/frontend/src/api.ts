/** Thin client for the documented service endpoints. */

import {
  assertPredictionPayload,
  ItemEntry,
  PredictionPayload,
  UnknownItemsError,
} from "./types.js";

export class UnknownItemsRejection extends Error {
  unknownItems: string[];

  constructor(body: UnknownItemsError) {
    super(body.detail);
    this.unknownItems = body.unknown_items;
  }
}

export interface PredictRequest {
  customer_id: string;
  basket: string[];
  k: number;
  method: string;
  explain: boolean;
}

export interface ApiClient {
  customers(): Promise<string[]>;
  items(customerId: string): Promise<ItemEntry[]>;
  predict(req: PredictRequest): Promise<PredictionPayload>;
}

export function createApiClient(baseUrl: string, fetchFn: typeof fetch = fetch): ApiClient {
  const base = baseUrl.replace(/\/$/, "");

  async function getJson(path: string): Promise<unknown> {
    const resp = await fetchFn(`${base}${path}`);
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status}`);
    }
    return resp.json();
  }

  return {
    async customers(): Promise<string[]> {
      const data = await getJson("/customers");
      if (!Array.isArray(data)) throw new Error("customer list schema mismatch");
      return data as string[];
    },

    async items(customerId: string): Promise<ItemEntry[]> {
      const data = await getJson(`/customers/${encodeURIComponent(customerId)}/items`);
      if (!Array.isArray(data)) throw new Error("item list schema mismatch");
      return data as ItemEntry[];
    },

    async predict(req: PredictRequest): Promise<PredictionPayload> {
      const resp = await fetchFn(`${base}/predict`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(req),
      });
      if (resp.status === 422) {
        throw new UnknownItemsRejection((await resp.json()) as UnknownItemsError);
      }
      if (!resp.ok) {
        throw new Error(`predict failed: ${resp.status}`);
      }
      return assertPredictionPayload(await resp.json());
    },
  };
}

/** Service base URL: ?api=... beats a global override beats same-host default. */
export function resolveBaseUrl(loc: Location = window.location): string {
  const fromQuery = new URLSearchParams(loc.search).get("api");
  if (fromQuery) return fromQuery;
  const override = (window as unknown as { FIPKIT_API?: string }).FIPKIT_API;
  if (override) return override;
  return `${loc.protocol}//${loc.hostname}:8000`;
}
