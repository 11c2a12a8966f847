/** Pure HTML renderers: state in, markup out, no DOM access.
 *
 * Every number shown comes straight from the service payload; pattern
 * (TARS) explanation lines carry a dedicated class so they render
 * highlighted.
 */

import { DraftState } from "./store.js";
import { Breakdown, ExplanationLine, PredictionPayload } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderErrorBanner(state: DraftState): string {
  if (!state.error) return "";
  const retry = state.canRetry
    ? '<button class="retry" data-retry>Retry</button>'
    : "";
  return `<div class="banner error" role="alert">${escapeHtml(state.error)}${retry}</div>`;
}

export function renderBasket(state: DraftState): string {
  if (state.basket.length === 0) {
    return '<p class="empty">Basket is empty - add items to get suggestions.</p>';
  }
  const chips = state.basket
    .map((item) => {
      const invalid = state.invalidItems.includes(item) ? " invalid" : "";
      const flag = state.invalidItems.includes(item)
        ? '<span class="flag" title="unknown to this customer">!</span>'
        : "";
      return (
        `<span class="chip${invalid}">${escapeHtml(item)}${flag}` +
        `<button class="remove" data-remove="${escapeHtml(item)}" aria-label="remove ${escapeHtml(item)}">x</button></span>`
      );
    })
    .join("");
  return `<div class="basket-chips">${chips}</div>`;
}

function renderLine(line: ExplanationLine): string {
  const cls = line.kind === "tars" ? "line tars-line" : "line";
  return `<li class="${cls}" data-kind="${line.kind}">${escapeHtml(line.text)}</li>`;
}

function renderBreakdown(b: Breakdown): string {
  const rows = (Object.entries(b) as [string, number][])
    .map(([key, value]) => `<tr><th>${key}</th><td>${String(value)}</td></tr>`)
    .join("");
  return (
    "<details class=\"breakdown\"><summary>Raw score breakdown</summary>" +
    `<table>${rows}</table></details>`
  );
}

export function renderSuggestionCards(payload: PredictionPayload | null): string {
  if (payload === null) {
    return "";
  }
  if (payload.forgotten.length === 0) {
    return '<p class="empty" data-empty-suggestions>No suggestions for this basket.</p>';
  }
  const cards = payload.forgotten.map((item, index) => {
    const lines = payload.explanations?.[item] ?? [];
    const breakdown = payload.breakdowns?.[item];
    return (
      `<article class="card" data-item="${escapeHtml(item)}">` +
      `<header><span class="rank">#${index + 1}</span>` +
      `<h3>${escapeHtml(item)}</h3>` +
      `<button class="add" data-add="${escapeHtml(item)}">Add to basket</button></header>` +
      `<ul class="lines">${lines.map(renderLine).join("")}</ul>` +
      (breakdown ? renderBreakdown(breakdown) : "") +
      "</article>"
    );
  });
  return cards.join("");
}

export function renderCustomerOptions(customers: string[], selected: string | null): string {
  const placeholder = `<option value="" ${selected === null ? "selected" : ""} disabled>pick a customer</option>`;
  const options = customers
    .map(
      (id) =>
        `<option value="${escapeHtml(id)}" ${id === selected ? "selected" : ""}>${escapeHtml(id)}</option>`
    )
    .join("");
  return placeholder + options;
}

export function renderItemOptions(state: DraftState): string {
  return state.knownItems
    .filter((entry) => !state.basket.includes(entry.item))
    .map((entry) => `<option value="${escapeHtml(entry.item)}"></option>`)
    .join("");
}

export function renderStatus(state: DraftState): string {
  if (state.loading) return '<span class="status loading">predicting...</span>';
  if (state.response) {
    return `<span class="status">method ${escapeHtml(state.response.method)}, k=${state.response.k}</span>`;
  }
  return "";
}
