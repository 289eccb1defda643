/** Browser entry point: wires the store and view-model to the real DOM.
 *
 * Served from the service's --static directory; talks to the same origin.
 */

import { ApiClient } from "./api.js";
import { PairStore } from "./store.js";
import { buildPairView, labelWarnings, renderPair, unvalidatedCycle } from "./viewmodel.js";
import type { EditIntent, PairPayload } from "./types.js";

const INTENTS: EditIntent[] = [
  "grammar",
  "clarity",
  "fact_evidence",
  "claim",
  "other",
];

const POLL_MS = 5000;

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const api = new ApiClient((url, init) => fetch(url, init));
  const store = new PairStore(api);
  let cycle: string[] = [];
  let cursor = 0;

  const render = () => {
    const state = store.getState();
    if (!state.payload) {
      root.innerHTML = '<div class="empty-state">Loading…</div>';
      return;
    }
    const payload: PairPayload = { ...state.payload, edits: state.edits };
    const view = buildPairView(payload);
    view.revision = state.revision;
    cycle = unvalidatedCycle(view);
    root.innerHTML = renderPair(view);
    if (state.banner) {
      const banner = document.createElement("div");
      banner.className = "banner";
      banner.textContent = state.banner;
      root.prepend(banner);
    }
    wireLabelPickers(root);
  };

  const wireLabelPickers = (container: HTMLElement) => {
    for (const el of container.querySelectorAll<HTMLElement>(".connector")) {
      el.onclick = () => {
        const editId = el.dataset.edit;
        const action = el.dataset.action ?? "modify";
        if (!editId) {
          return;
        }
        const answer = window.prompt(
          `Intent for ${action} edit (${INTENTS.join("/")})`,
          el.dataset.intents ?? ""
        );
        if (answer === null) {
          return;
        }
        const intent = answer.trim() as EditIntent;
        const intents = intent ? [intent] : [];
        for (const warning of labelWarnings(action as never, intents)) {
          window.alert(warning);
        }
        void store.setIntent(editId, intents);
      };
    }
  };

  document.addEventListener("keydown", (event) => {
    if (event.key === "n" && cycle.length > 0) {
      cursor = (cursor + 1) % cycle.length;
      const target = document.querySelector(`[data-edit="${cycle[cursor]}"]`);
      target?.scrollIntoView({ behavior: "smooth", block: "center" });
    }
  });

  store.subscribe(render);
  const pairs = await api.listPairs();
  const requested = new URLSearchParams(window.location.search).get("pair");
  const pairId = requested ?? pairs[0]?.pair_id;
  if (!pairId) {
    root.innerHTML = '<div class="empty-state">No pairs in the manifest.</div>';
    return;
  }
  await store.load(pairId);
  render();

  window.setInterval(() => {
    const state = store.getState();
    if (state.pending || !state.payload) {
      return;
    }
    void api.listPairs().then((listing) => {
      const entry = listing.find((p) => p.pair_id === state.payload?.pair_id);
      if (entry && entry.revision !== state.revision) {
        void store.load(entry.pair_id);
      }
    });
  }, POLL_MS);
}

void boot();
