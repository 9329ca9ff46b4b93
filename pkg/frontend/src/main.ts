/** DOM wiring for the workbench page. All rendering goes through the pure
 * functions in render.ts; all figures come from the service via api.ts. */

import { ApiClient, ApiError } from "./api.js";
import { renderWorkbench } from "./render.js";
import { Store } from "./store.js";
import type { TransformBody } from "./types.js";

const client = new ApiClient("");
const store = new Store();

function mount(): void {
  const root = document.getElementById("workbench");
  const uploadForm = document.getElementById("upload") as HTMLFormElement | null;
  if (!root || !uploadForm) return;

  store.subscribe((state) => {
    root.innerHTML = renderWorkbench(state);
  });

  uploadForm.addEventListener("submit", (event) => {
    event.preventDefault();
    void startSession(uploadForm);
  });

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const subsetItem = target.closest<HTMLElement>(".risky-subset");
    if (subsetItem?.dataset.subset) {
      store.set({ selectedSubset: subsetItem.dataset.subset.split(",") });
      return;
    }
    if (target.dataset.action === "undo") void undo();
  });

  const whatifForm = document.getElementById("whatif") as HTMLFormElement | null;
  whatifForm?.addEventListener("submit", (event) => {
    event.preventDefault();
    void preview(whatifForm, false);
  });
  document.getElementById("commit")?.addEventListener("click", () => {
    if (whatifForm) void preview(whatifForm, true);
  });
  document.getElementById("discard")?.addEventListener("click", () => {
    store.set({ whatif: null, whatifColumn: null });
  });
}

async function startSession(form: HTMLFormElement): Promise<void> {
  try {
    const data = new FormData(form);
    const csvFile = data.get("data") as File;
    const schemaFile = data.get("schema") as File;
    const session = await client.createSession(
      await csvFile.text(),
      await schemaFile.text(),
    );
    const epsilon0 = Number(data.get("epsilon0") ?? 0.5);
    const kMax = Number(data.get("k_max") ?? 4);
    await client.setConfig(session.session_id, {
      epsilon0,
      k_max: kMax,
    });
    const bundle = await client.analyze(session.session_id);
    store.set({
      sessionId: session.session_id,
      bundle,
      selectedSubset: null,
      whatif: null,
      whatifColumn: null,
      historyDepth: 0,
      error: null,
    });
  } catch (error) {
    report(error);
  }
}

async function preview(form: HTMLFormElement, commit: boolean): Promise<void> {
  const state = store.get();
  if (!state.sessionId) return;
  try {
    const data = new FormData(form);
    const kind = String(data.get("transform") ?? "generalize");
    const column = String(data.get("column") ?? "");
    const level = Number(data.get("level") ?? 1);
    const body: TransformBody =
      kind === "generalize" ? { generalize: { column, level } } : { [kind]: {} };
    const whatif = await client.whatif(state.sessionId, body, commit);
    if (commit) {
      const bundle = await client.analyze(state.sessionId);
      store.set({
        bundle,
        whatif,
        whatifColumn: kind === "generalize" ? column : null,
        historyDepth: state.historyDepth + 1,
        error: null,
      });
    } else {
      store.set({
        whatif,
        whatifColumn: kind === "generalize" ? column : null,
        error: null,
      });
    }
  } catch (error) {
    report(error);
  }
}

async function undo(): Promise<void> {
  const state = store.get();
  if (!state.sessionId || state.historyDepth === 0) return;
  try {
    const { history_depth } = await client.undo(state.sessionId);
    const bundle = await client.analyze(state.sessionId);
    store.set({
      bundle,
      whatif: null,
      whatifColumn: null,
      historyDepth: history_depth,
      error: null,
    });
  } catch (error) {
    report(error);
  }
}

function report(error: unknown): void {
  const message =
    error instanceof ApiError
      ? `${error.name}: ${error.detail}`
      : String(error);
  store.set({ error: message });
}

document.addEventListener("DOMContentLoaded", mount);
