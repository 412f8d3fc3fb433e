/** Wires the widgets to the gateway and owns all session state.
 *
 * Two concurrency rules hold everywhere: at most one query is in
 * flight (extra submits are dropped, not queued), and feedback posts
 * go through a FIFO queue so ratings land in click order. Results are
 * always rendered exactly in the order the service returned them.
 */

import { ApiError } from "./api.js";
import type { ApiLike, StatsResponse, Suggestion } from "./api.js";
import { renderCard, renderChips, renderError, renderStats } from "./render.js";

export interface SessionState {
  user: string;
  domain: string;
  lastQuery: string;
  suggestions: Suggestion[];
  stats: StatsResponse | null;
}

export interface App {
  state: SessionState;
  root: HTMLElement;
  submitQuery(): Promise<void>;
  rate(docId: string, rating: number, card: HTMLElement): Promise<void>;
  refreshSession(): Promise<void>;
  /** resolves once every queued feedback post has settled */
  feedbackIdle(): Promise<void>;
}

const SKELETON = `
  <header class="topbar"><h1>semvid</h1></header>
  <section class="session">
    <label>user <input class="in-user" placeholder="user id"></label>
    <label>domain <input class="in-domain" value="sports"></label>
    <label>k <input class="in-k" type="number" min="0" value="5"></label>
  </section>
  <section class="query">
    <input class="in-query" placeholder="search videos">
    <button class="btn-go" type="button" disabled>search</button>
    <span class="p-global"></span>
    <span class="hint">enter a user id to search</span>
  </section>
  <div class="banner-slot"></div>
  <section class="chips-slot"></section>
  <section class="results"></section>
  <section class="stats-slot"></section>
`;

export function initApp(doc: Document, api: ApiLike): App {
  const root = doc.createElement("div");
  root.className = "app";
  root.innerHTML = SKELETON;
  doc.body.appendChild(root);

  const pick = <T extends HTMLElement>(sel: string): T => {
    const node = root.querySelector(sel);
    if (!node) throw new Error(`missing element ${sel}`);
    return node as T;
  };

  const userInput = pick<HTMLInputElement>(".in-user");
  const domainInput = pick<HTMLInputElement>(".in-domain");
  const kInput = pick<HTMLInputElement>(".in-k");
  const queryInput = pick<HTMLInputElement>(".in-query");
  const goBtn = pick<HTMLButtonElement>(".btn-go");
  const pGlobal = pick<HTMLElement>(".p-global");
  const hint = pick<HTMLElement>(".hint");
  const bannerSlot = pick<HTMLElement>(".banner-slot");
  const chipsSlot = pick<HTMLElement>(".chips-slot");
  const resultsBox = pick<HTMLElement>(".results");
  const statsSlot = pick<HTMLElement>(".stats-slot");

  const state: SessionState = {
    user: "",
    domain: domainInput.value,
    lastQuery: "",
    suggestions: [],
    stats: null,
  };

  let queryInFlight = false;
  let feedbackQueue: Promise<void> = Promise.resolve();

  const showError = (code: string, message: string): void => {
    bannerSlot.replaceChildren(renderError(doc, code, message));
  };

  const clearError = (): void => {
    bannerSlot.replaceChildren();
  };

  const asCodeMessage = (exc: unknown): [string, string] =>
    exc instanceof ApiError ? [exc.code, exc.message] : ["NetworkError", String(exc)];

  const syncControls = (): void => {
    state.user = userInput.value.trim();
    state.domain = domainInput.value.trim();
    const ready = state.user !== "";
    goBtn.disabled = !ready;
    hint.hidden = ready;
  };

  const renderSuggestions = (): void => {
    chipsSlot.replaceChildren(renderChips(doc, state.suggestions, (text) => {
      queryInput.value = text;
      void submitQuery();
    }));
  };

  const renderStatsRow = (): void => {
    statsSlot.replaceChildren();
    if (state.stats) statsSlot.appendChild(renderStats(doc, state.stats));
  };

  /** pull chips and the stats row; banner only on failure */
  const refreshSession = async (): Promise<void> => {
    syncControls();
    if (state.user === "") return;
    try {
      state.suggestions = await api.suggestions(state.user, state.domain, 5);
      state.stats = await api.stats();
    } catch (exc) {
      const [code, message] = asCodeMessage(exc);
      showError(code, message);
      return;
    }
    renderSuggestions();
    renderStatsRow();
  };

  const rate = (docId: string, rating: number, card: HTMLElement): Promise<void> => {
    const attempt = async (): Promise<void> => {
      const tauBadge = card.querySelector(".card-tau") as HTMLElement;
      const current = card.querySelector(".rating-current") as HTMLElement;
      const retryBtn = card.querySelector(".rating-retry") as HTMLButtonElement;
      const cardError = card.querySelector(".card-error") as HTMLElement;
      try {
        const ack = await api.feedback(state.user, docId, rating);
        current.textContent = `rated ${rating}`;
        tauBadge.textContent = `tau ${ack.ok.tau.toFixed(3)}`;
        cardError.textContent = "";
        retryBtn.hidden = true;
        state.suggestions = await api.suggestions(state.user, state.domain, 5);
        renderSuggestions();
      } catch (exc) {
        const [code, message] = asCodeMessage(exc);
        if (code === "NetworkError") {
          // nothing changed server-side for sure, so offer the same send again
          retryBtn.hidden = false;
          retryBtn.onclick = () => {
            retryBtn.hidden = true;
            void rate(docId, rating, card);
          };
        }
        cardError.textContent = `${code}: ${message}`;
      }
    };
    feedbackQueue = feedbackQueue.then(attempt);
    return feedbackQueue;
  };

  const submitQuery = async (): Promise<void> => {
    syncControls();
    if (queryInFlight || state.user === "") return;
    queryInFlight = true;
    goBtn.disabled = true;
    clearError();
    try {
      const k = Math.max(0, Number.parseInt(kInput.value, 10) || 0);
      const text = queryInput.value;
      const res = await api.query(state.user, state.domain, text, k);
      state.lastQuery = text;
      resultsBox.replaceChildren();
      if (res.results.length === 0) {
        const empty = doc.createElement("p");
        empty.className = "no-results";
        empty.textContent = "no results";
        resultsBox.appendChild(empty);
      }
      for (const row of res.results) {
        resultsBox.appendChild(renderCard(doc, row, (id, rating, card) => {
          void rate(id, rating, card);
        }));
      }
      pGlobal.textContent = `P ${res.performance.p_global.toFixed(4)}`;
      state.suggestions = await api.suggestions(state.user, state.domain, 5);
      state.stats = await api.stats();
      renderSuggestions();
      renderStatsRow();
    } catch (exc) {
      const [code, message] = asCodeMessage(exc);
      showError(code, message);
    } finally {
      queryInFlight = false;
      syncControls();
    }
  };

  userInput.addEventListener("input", syncControls);
  domainInput.addEventListener("input", syncControls);
  userInput.addEventListener("change", () => void refreshSession());
  domainInput.addEventListener("change", () => void refreshSession());
  goBtn.addEventListener("click", () => void submitQuery());
  queryInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void submitQuery();
  });
  syncControls();

  return {
    state,
    root,
    submitQuery,
    rate,
    refreshSession,
    feedbackIdle: () => feedbackQueue,
  };
}
