/** View assembly: pure HTML builders for the control-room panels.
 *
 * Rendering never recomputes engine math; every figure shown is lifted from
 * an API payload (see charts.ts for the only scaling arithmetic). Each panel
 * carries data-version so the UI can prove it renders committed state.
 */

import {
  bufferChart,
  fanChart,
  overtimeChart,
  sCurveChart,
  tornadoChart,
} from "./charts.js";
import { PRESETS, referenceTornadoRows } from "./presets.js";
import type {
  BufferPayload,
  EvmPayload,
  ForecastPayload,
  ProjectPayload,
  RecommendationRow,
  RecommendationsPayload,
  TornadoRow,
} from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function banner(kind: "error" | "conflict" | "info", message: string): string {
  return `<div class="banner banner-${kind}" role="alert">${esc(message)}</div>`;
}

export function connectionBanner(apiBase: string, error: string): string {
  return banner("error", `cannot reach ${apiBase}: ${error}`);
}

export function conflictBanner(): string {
  return banner(
    "conflict",
    "someone else changed this project (version conflict) - refresh to load the latest state",
  );
}

/** Week selector; selecting a week filters charts client-side by slicing the
 * already-fetched series (no recomputation). */
export function weekSelector(weeksRun: number[], selected: number | null): string {
  const options = weeksRun
    .map(
      (w) =>
        `<option value="${w}"${w === selected ? " selected" : ""}>week ${w}</option>`,
    )
    .join("");
  return (
    `<label class="week-selector">view through ` +
    `<select id="week-select"><option value="">latest</option>${options}</select></label>`
  );
}

function sliceForecast(payload: ForecastPayload, week: number | null): ForecastPayload {
  if (week === null) return payload;
  return { ...payload, series: payload.series.filter((s) => s.week <= week) };
}

function sliceBuffers(payload: BufferPayload, week: number | null): BufferPayload {
  if (week === null || !payload.weeks.length) return payload;
  const weeks = payload.weeks.filter((w) => w.week <= week);
  const last = weeks[weeks.length - 1];
  return { ...payload, weeks, percent_used: last ? last.percent_used : 0 };
}

export interface ViewData {
  project: ProjectPayload;
  forecast: ForecastPayload;
  evm: EvmPayload;
  buffers: BufferPayload;
  tornadoRows: TornadoRow[];
  selectedWeek: number | null;
}

/** The five chart views plus the week selector. */
export function renderViews(data: ViewData): string {
  const { project, selectedWeek } = data;
  const forecast = sliceForecast(data.forecast, selectedWeek);
  const buffers = sliceBuffers(data.buffers, selectedWeek);
  const overtime = project.overtime
    ? {
        ...project.overtime,
        weeks: selectedWeek === null
          ? project.overtime.weeks
          : project.overtime.weeks.filter((w) => w.week <= selectedWeek),
      }
    : null;
  const liveTornado = data.tornadoRows.length
    ? tornadoChart(data.tornadoRows, project.version, "tornado-live")
    : banner("info", "no scenarios evaluated yet - use the what-if builder") +
      tornadoChart([], project.version, "tornado-live");
  return `
<section class="views" data-version="${project.version}">
  <header class="views-header">
    <h2>${esc(project.project_id)}</h2>
    <span class="version-chip" data-version="${project.version}">v${project.version}</span>
    ${weekSelector(project.weeks_run, selectedWeek)}
  </header>
  <div class="panel panel-forecast">${fanChart(forecast)}</div>
  <div class="panel panel-scurve">${sCurveChart(data.evm)}</div>
  <div class="panel panel-buffer">${bufferChart(buffers)}</div>
  <div class="panel panel-overtime">${overtimeChart(overtime, project.version)}</div>
  <div class="panel panel-tornado-live">${liveTornado}</div>
  <div class="panel panel-tornado-reference">
    ${tornadoChart(referenceTornadoRows(), project.version, "tornado-reference")}
    <p class="reference-note">reference sensitivity (published benchmark deltas)</p>
  </div>
</section>`;
}

function inboxRow(rec: RecommendationRow, version: number): string {
  const decided = rec.status !== "proposed";
  const buttons = decided
    ? `<span class="status status-${rec.status}" data-status="${rec.status}">${rec.status}` +
      (rec.reason ? `: ${esc(rec.reason)}` : "") +
      `</span>`
    : `<button class="adopt" data-action-id="${rec.action_id}" data-version="${version}">adopt</button>
       <button class="reject" data-action-id="${rec.action_id}" data-version="${version}">reject</button>
       <input class="reason" data-action-id="${rec.action_id}" placeholder="reason (optional)"/>`;
  return `
  <tr class="inbox-row" data-action-id="${rec.action_id}" data-status="${rec.status}">
    <td>${esc(rec.action_id)}</td>
    <td>w${rec.week}</td>
    <td>${esc(rec.summary)}</td>
    <td class="delta">${rec.predicted_overtime_delta >= 0 ? "+" : ""}${rec.predicted_overtime_delta.toFixed(1)} h</td>
    <td>${buttons}</td>
  </tr>`;
}

/** Recommendation inbox with accept/reject controls. */
export function renderInbox(payload: RecommendationsPayload): string {
  const rows = payload.recommendations
    .slice()
    .sort((a, b) => a.week - b.week || a.action_id.localeCompare(b.action_id))
    .map((r) => inboxRow(r, payload.version))
    .join("");
  const proposed = payload.recommendations.filter((r) => r.status === "proposed").length;
  return `
<section class="inbox" data-version="${payload.version}" data-proposed="${proposed}">
  <h2>Recommendation inbox <span class="version-chip">v${payload.version}</span></h2>
  <table>
    <thead><tr><th>id</th><th>week</th><th>recommendation</th><th>predicted dOT</th><th>decision</th></tr></thead>
    <tbody>${rows || `<tr><td colspan="5" class="empty">no recommendations yet</td></tr>`}</tbody>
  </table>
</section>`;
}

/** Scenario builder: preset picker plus a free-form perturbation editor. */
export function renderScenarioBuilder(validationErrors: string[] = []): string {
  const presetOptions = PRESETS.map(
    (p) => `<option value="${p.name}">${esc(p.label ?? p.name)}</option>`,
  ).join("");
  const problems = validationErrors.length
    ? `<ul class="form-errors">${validationErrors
        .map((e) => `<li>${esc(e)}</li>`)
        .join("")}</ul>`
    : "";
  return `
<section class="scenario-builder">
  <h2>What-if scenario builder</h2>
  <label>preset <select id="preset-select"><option value="">custom...</option>${presetOptions}</select></label>
  <textarea id="scenario-json" rows="8" spellcheck="false"
    placeholder='{"name": "my-scenario", "perturbations": [{"type": "duration-offset", "activity": "A090", "days": 3}]}'></textarea>
  ${problems}
  <button id="evaluate-scenario">evaluate</button>
  <div id="scenario-result" class="scenario-result"></div>
</section>`;
}

export function renderScenarioResult(result: {
  name: string;
  d_finish_p50: number;
  d_finish_p80: number;
  d_cost_p50: number;
  d_cost_p80: number;
}): string {
  const sign = (v: number) => `${v >= 0 ? "+" : ""}${v.toFixed(1)}`;
  return (
    `<div class="scenario-outcome" data-name="${esc(result.name)}" ` +
    `data-d-finish-p50="${result.d_finish_p50}">` +
    `<strong>${esc(result.name)}</strong>: finish ${sign(result.d_finish_p50)} d (p50), ` +
    `${sign(result.d_finish_p80)} d (p80); cost ${sign(result.d_cost_p50)}k (p50), ` +
    `${sign(result.d_cost_p80)}k (p80)</div>`
  );
}
