/** Client-side state of the what-if basket draft.
 *
 * Every edit (add/remove item, change k, toggle method, apply a
 * suggestion) schedules a prediction request after a short debounce;
 * responses are applied latest-wins, so a stale response never
 * overwrites a newer one. All state lives in memory: a refresh starts
 * from a clean draft.
 */

import { ApiClient, UnknownItemsRejection } from "./api.js";
import { ItemEntry, MethodTag, PredictionPayload } from "./types.js";

export interface DraftState {
  customers: string[];
  customerId: string | null;
  knownItems: ItemEntry[];
  basket: string[];
  k: number;
  method: MethodTag;
  response: PredictionPayload | null;
  loading: boolean;
  /** Error banner text; null when healthy. */
  error: string | null;
  /** True when the last failure is retryable (network trouble). */
  canRetry: boolean;
  /** Basket tokens the service rejected (422), flagged inline. */
  invalidItems: string[];
}

export interface StoreOptions {
  api: ApiClient;
  debounceMs?: number;
  kMin?: number;
  kMax?: number;
}

const DEFAULT_DEBOUNCE_MS = 150;

type Listener = (state: DraftState) => void;

export class BasketStore {
  private api: ApiClient;
  private debounceMs: number;
  private kMin: number;
  private kMax: number;
  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;
  private applied = 0;
  private inflight = 0;
  private idleWaiters: (() => void)[] = [];

  state: DraftState = {
    customers: [],
    customerId: null,
    knownItems: [],
    basket: [],
    k: 5,
    method: "xmt",
    response: null,
    loading: false,
    error: null,
    canRetry: false,
    invalidItems: [],
  };

  constructor(options: StoreOptions) {
    this.api = options.api;
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.kMin = options.kMin ?? 1;
    this.kMax = options.kMax ?? 50;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify() {
    for (const listener of this.listeners) listener(this.state);
    if (this.timer === null && this.inflight === 0) {
      const waiters = this.idleWaiters;
      this.idleWaiters = [];
      for (const resolve of waiters) resolve();
    }
  }

  /** Resolves once no prediction is scheduled or in flight. */
  whenIdle(): Promise<void> {
    if (this.timer === null && this.inflight === 0) return Promise.resolve();
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }

  async init(): Promise<void> {
    try {
      const customers = await this.api.customers();
      this.state = { ...this.state, customers, error: null, canRetry: false };
    } catch (err) {
      this.state = { ...this.state, error: String(err), canRetry: true };
    }
    this.notify();
  }

  async selectCustomer(customerId: string): Promise<void> {
    this.cancelScheduled();
    this.state = {
      ...this.state,
      customerId,
      knownItems: [],
      basket: [],
      response: null,
      error: null,
      canRetry: false,
      invalidItems: [],
    };
    this.notify();
    try {
      const knownItems = await this.api.items(customerId);
      this.state = { ...this.state, knownItems };
    } catch (err) {
      this.state = { ...this.state, error: String(err), canRetry: true };
    }
    this.notify();
  }

  addItem(item: string) {
    if (!this.state.customerId || this.state.basket.includes(item)) return;
    this.state = { ...this.state, basket: [...this.state.basket, item] };
    this.scheduleRefresh();
  }

  removeItem(item: string) {
    if (!this.state.basket.includes(item)) return;
    this.state = {
      ...this.state,
      basket: this.state.basket.filter((i) => i !== item),
      invalidItems: this.state.invalidItems.filter((i) => i !== item),
    };
    this.scheduleRefresh();
  }

  /** Clicking a suggestion moves it into the basket, closing the loop. */
  applySuggestion(item: string) {
    this.addItem(item);
  }

  setK(k: number) {
    const clamped = Math.min(this.kMax, Math.max(this.kMin, Math.round(k)));
    if (clamped === this.state.k) return;
    this.state = { ...this.state, k: clamped };
    this.scheduleRefresh();
  }

  setMethod(method: MethodTag) {
    if (method === this.state.method) return;
    this.state = { ...this.state, method };
    this.scheduleRefresh();
  }

  /** Re-issue the current draft immediately (retry affordance). */
  retry() {
    this.scheduleRefresh(0);
  }

  private cancelScheduled() {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private scheduleRefresh(delay = this.debounceMs) {
    this.cancelScheduled();
    if (!this.state.customerId || this.state.basket.length === 0) {
      this.state = { ...this.state, response: null, loading: false, invalidItems: [] };
      this.notify();
      return;
    }
    this.state = { ...this.state, loading: true };
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.issueRequest();
    }, delay);
    this.notify();
  }

  private async issueRequest(): Promise<void> {
    const seq = ++this.sequence;
    const { customerId, basket, k, method } = this.state;
    if (!customerId) return;
    this.inflight += 1;
    try {
      const response = await this.api.predict({
        customer_id: customerId,
        basket: [...basket],
        k,
        method,
        explain: true,
      });
      if (seq > this.applied && seq === this.sequence) {
        this.applied = seq;
        this.state = {
          ...this.state,
          response,
          loading: false,
          error: null,
          canRetry: false,
          invalidItems: [],
        };
      }
    } catch (err) {
      if (seq === this.sequence) {
        if (err instanceof UnknownItemsRejection) {
          this.state = {
            ...this.state,
            loading: false,
            error: "some basket items are unknown to this customer's profile",
            canRetry: false,
            invalidItems: err.unknownItems,
          };
        } else {
          this.state = {
            ...this.state,
            loading: false,
            error: String(err),
            canRetry: true,
          };
        }
      }
    } finally {
      this.inflight -= 1;
      this.notify();
    }
  }
}
