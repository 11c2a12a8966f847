/** DOM wiring: one store, event delegation, full re-render per update. */

import { createApiClient, resolveBaseUrl } from "./api.js";
import {
  renderBasket,
  renderCustomerOptions,
  renderErrorBanner,
  renderItemOptions,
  renderStatus,
  renderSuggestionCards,
} from "./render.js";
import { BasketStore } from "./store.js";
import { MethodTag } from "./types.js";

const api = createApiClient(resolveBaseUrl());
const store = new BasketStore({ api });

const el = {
  banner: document.getElementById("banner")!,
  customer: document.getElementById("customer") as HTMLSelectElement,
  itemInput: document.getElementById("item-input") as HTMLInputElement,
  itemOptions: document.getElementById("item-options")!,
  basket: document.getElementById("basket")!,
  k: document.getElementById("k") as HTMLInputElement,
  status: document.getElementById("status")!,
  cards: document.getElementById("cards")!,
};

store.subscribe((state) => {
  el.banner.innerHTML = renderErrorBanner(state);
  el.customer.innerHTML = renderCustomerOptions(state.customers, state.customerId);
  el.itemOptions.innerHTML = renderItemOptions(state);
  el.basket.innerHTML = renderBasket(state);
  el.status.innerHTML = renderStatus(state);
  el.cards.innerHTML = renderSuggestionCards(state.response);
});

el.customer.addEventListener("change", () => {
  if (el.customer.value) void store.selectCustomer(el.customer.value);
});

el.itemInput.addEventListener("change", () => {
  const token = el.itemInput.value.trim();
  if (token) {
    store.addItem(token);
    el.itemInput.value = "";
  }
});

el.k.addEventListener("change", () => store.setK(Number(el.k.value)));

for (const radio of document.querySelectorAll<HTMLInputElement>('input[name="method"]')) {
  radio.addEventListener("change", () => {
    if (radio.checked) store.setMethod(radio.value as MethodTag);
  });
}

document.body.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const add = target.getAttribute("data-add");
  if (add) store.applySuggestion(add);
  const remove = target.getAttribute("data-remove");
  if (remove) store.removeItem(remove);
  if (target.hasAttribute("data-retry")) store.retry();
});

void store.init();
