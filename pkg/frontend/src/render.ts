/** DOM builders for the result list, suggestion chips, stats and errors.
 *
 * Pure construction: no fetch calls in here. Interaction callbacks are
 * injected so tests can drive the widgets directly.
 */

import type { Breakdown, ResultRow, StatsResponse, Suggestion } from "./api.js";
import { renderStoryboard } from "./swatch.js";

export const RATINGS = [0, 1, 2, 3, 4, 5] as const;

const BREAKDOWN_PARTS: (keyof Breakdown)[] = ["concept", "text", "pref", "pher"];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBreakdown(doc: Document, breakdown: Breakdown): HTMLElement {
  const box = el(doc, "div", "breakdown");
  for (const part of BREAKDOWN_PARTS) {
    const row = el(doc, "div", "breakdown-row");
    row.appendChild(el(doc, "span", "breakdown-label", part));
    const track = el(doc, "div", "breakdown-track");
    const bar = el(doc, "div", `breakdown-bar part-${part}`);
    const value = Math.min(Math.max(breakdown[part], 0), 1);
    bar.style.width = `${(value * 100).toFixed(1)}%`;
    track.appendChild(bar);
    row.appendChild(track);
    row.appendChild(el(doc, "span", "breakdown-value", breakdown[part].toFixed(3)));
    box.appendChild(row);
  }
  return box;
}

/** One result card. Rows arrive ranked; the card never re-sorts anything.
 *  The rating buttons are the only way to emit a rating, so the value
 *  sent is always one of 0..5. */
export function renderCard(
  doc: Document, row: ResultRow,
  onRate: (docId: string, rating: number, card: HTMLElement) => void,
): HTMLElement {
  const card = el(doc, "article", "card");
  card.dataset.docId = row.doc_id;

  const head = el(doc, "header", "card-head");
  head.appendChild(el(doc, "h3", "card-title", row.doc_id));
  head.appendChild(el(doc, "span", `tier-badge tier-${row.tier}`, row.tier));
  card.appendChild(head);

  card.appendChild(el(doc, "p", "card-score", `score ${row.score.toFixed(4)}`));
  card.appendChild(renderBreakdown(doc, row.breakdown));
  card.appendChild(renderStoryboard(doc, row.storyboard));

  const rate = el(doc, "div", "rating");
  rate.appendChild(el(doc, "span", "rating-label", "rate"));
  for (const value of RATINGS) {
    const btn = el(doc, "button", "rating-btn", String(value));
    btn.type = "button";
    btn.dataset.rating = String(value);
    btn.addEventListener("click", () => onRate(row.doc_id, value, card));
    rate.appendChild(btn);
  }
  rate.appendChild(el(doc, "span", "rating-current", ""));
  rate.appendChild(el(doc, "span", "card-tau", ""));
  const retry = el(doc, "button", "rating-retry", "retry");
  retry.type = "button";
  retry.hidden = true;
  rate.appendChild(retry);
  rate.appendChild(el(doc, "span", "card-error", ""));
  card.appendChild(rate);
  return card;
}

export function renderChips(
  doc: Document, items: Suggestion[],
  onPick: (text: string) => void,
): HTMLElement {
  const panel = el(doc, "div", "chips");
  for (const item of items) {
    const chip = el(doc, "button", `chip chip-${item.source}`);
    chip.type = "button";
    chip.dataset.source = item.source;
    chip.appendChild(el(doc, "span", "chip-text", item.text));
    chip.appendChild(el(doc, "span", "chip-tag", item.source));
    chip.addEventListener("click", () => onPick(item.text));
    panel.appendChild(chip);
  }
  return panel;
}

export function renderStats(doc: Document, stats: StatsResponse): HTMLElement {
  const row = el(doc, "div", "stats-row");
  const counts = stats.counts;
  const tiers = Object.keys(counts)
    .map((tier) => `${tier} ${counts[tier]}`)
    .join(" / ");
  row.appendChild(el(doc, "span", "stats-counts", `${tiers} (total ${stats.total})`));
  const perf = stats.performance;
  row.appendChild(el(
    doc, "span", "stats-perf",
    perf === null ? "P —" : `P ${perf.p_global.toFixed(4)}`,
  ));
  return row;
}

/** Error banner text always leads with the service's error code. */
export function renderError(doc: Document, code: string, message: string): HTMLElement {
  const banner = el(doc, "div", "error-banner", `${code}: ${message}`);
  banner.setAttribute("role", "alert");
  return banner;
}
