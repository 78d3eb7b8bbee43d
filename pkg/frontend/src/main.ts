/** Browser bootstrap: fetch, render, and wire the three interaction flows
 * (week selection, decision inbox, scenario builder). */

import { ConflictError, TwinApi } from "./api.js";
import { PRESETS, validateScenario } from "./presets.js";
import {
  conflictBanner,
  connectionBanner,
  renderInbox,
  renderScenarioBuilder,
  renderScenarioResult,
  renderViews,
} from "./views.js";
import type { ScenarioSpec, TornadoRow } from "./types.js";

const apiBase =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8008";
const api = new TwinApi(apiBase);

let selectedWeek: number | null = null;
let liveTornado: TornadoRow[] = [];

async function refresh(): Promise<void> {
  const root = document.getElementById("app")!;
  const bannerHost = document.getElementById("banners")!;
  try {
    const [project, forecast, evm, buffers, recs, tornado] = await Promise.all([
      api.project(),
      api.forecast(),
      api.evm(),
      api.buffers(),
      api.recommendations(),
      api.tornado(),
    ]);
    liveTornado = tornado.rows;
    root.innerHTML =
      renderViews({ project, forecast, evm, buffers, tornadoRows: liveTornado, selectedWeek }) +
      renderInbox(recs) +
      renderScenarioBuilder();
    bannerHost.innerHTML = "";
  } catch (err) {
    bannerHost.innerHTML = connectionBanner(apiBase, String(err));
  }
}

async function decide(actionId: string, adopted: boolean, version: number): Promise<void> {
  const bannerHost = document.getElementById("banners")!;
  const reasonInput = document.querySelector<HTMLInputElement>(
    `input.reason[data-action-id="${actionId}"]`,
  );
  try {
    await api.decide(actionId, adopted, reasonInput?.value ?? "", version);
    await refresh(); // status and the overtime chart re-render from fresh payloads
  } catch (err) {
    if (err instanceof ConflictError) {
      bannerHost.innerHTML = conflictBanner();
    } else {
      bannerHost.innerHTML = connectionBanner(apiBase, String(err));
    }
  }
}

async function evaluateScenario(): Promise<void> {
  const textarea = document.getElementById("scenario-json") as HTMLTextAreaElement;
  const resultHost = document.getElementById("scenario-result")!;
  let spec: ScenarioSpec;
  try {
    spec = JSON.parse(textarea.value);
  } catch {
    resultHost.innerHTML = `<div class="banner banner-error">scenario is not valid JSON</div>`;
    return;
  }
  const problems = validateScenario(spec);
  if (problems.length) {
    resultHost.innerHTML = `<ul class="form-errors">${problems
      .map((p) => `<li>${p}</li>`)
      .join("")}</ul>`;
    return;
  }
  try {
    const payload = await api.evaluateScenario(spec);
    resultHost.innerHTML = renderScenarioResult(payload.result);
    await refresh(); // the live tornado now includes this scenario
  } catch (err) {
    resultHost.innerHTML = `<div class="banner banner-error">${String(err)}</div>`;
  }
}

document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches("button.adopt, button.reject")) {
    const actionId = target.dataset.actionId!;
    const version = Number(target.dataset.version);
    void decide(actionId, target.classList.contains("adopt"), version);
  }
  if (target.id === "evaluate-scenario") {
    void evaluateScenario();
  }
});

document.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "week-select") {
    const value = (target as HTMLSelectElement).value;
    selectedWeek = value === "" ? null : Number(value);
    void refresh();
  }
  if (target.id === "preset-select") {
    const name = (target as HTMLSelectElement).value;
    const preset = PRESETS.find((p) => p.name === name);
    const textarea = document.getElementById("scenario-json") as HTMLTextAreaElement;
    if (preset) {
      const { reference, ...spec } = preset;
      textarea.value = JSON.stringify(spec, null, 2);
    }
  }
});

void refresh();
