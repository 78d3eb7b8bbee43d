/** Pure SVG chart builders.
 *
 * Every function maps an API payload straight to markup; the only client-side
 * arithmetic is linear scaling onto the canvas. Data attributes carry the raw
 * values so tests (and curious users) can trace each mark to its payload
 * field.
 */

import type {
  BufferPayload,
  EvmPayload,
  ForecastPayload,
  OvertimeReport,
  TornadoRow,
} from "./types.js";

const W = 640;
const H = 300;
const PAD = 44;

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function scale(value: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi === lo) return (outLo + outHi) / 2;
  return outLo + ((value - lo) / (hi - lo)) * (outHi - outLo);
}

function polyline(points: [number, number][], stroke: string, cls: string): string {
  const pts = points.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
  return `<polyline class="${cls}" fill="none" stroke="${stroke}" stroke-width="2" points="${pts}"/>`;
}

function frame(title: string, cls: string, body: string, version?: number): string {
  const versionAttr = version === undefined ? "" : ` data-version="${version}"`;
  return (
    `<svg class="chart ${cls}" viewBox="0 0 ${W} ${H}" xmlns="http://www.w3.org/2000/svg"${versionAttr}>` +
    `<text class="chart-title" x="${PAD}" y="18">${esc(title)}</text>${body}</svg>`
  );
}

/** Forecast fan: p50 line inside the p50-p80 band, with the actual-finish rule. */
export function fanChart(payload: ForecastPayload): string {
  const series = payload.series;
  if (!series.length) {
    return frame("Forecast fan", "fan-chart empty", emptyNote(), payload.version);
  }
  const weeks = series.map((s) => s.week);
  const values = series.flatMap((s) => [s.p50, s.p80]);
  if (payload.actual_finish) values.push(payload.actual_finish);
  const lo = Math.min(...values) - 1;
  const hi = Math.max(...values) + 1;
  const x = (w: number) => scale(w, weeks[0], weeks[weeks.length - 1], PAD, W - PAD);
  const y = (v: number) => scale(v, lo, hi, H - PAD, PAD);

  const bandTop = series.map((s) => [x(s.week), y(s.p80)] as [number, number]);
  const bandBottom = series
    .slice()
    .reverse()
    .map((s) => [x(s.week), y(s.p50)] as [number, number]);
  const band =
    `<polygon class="fan-band" fill="#9bbcdd" opacity="0.45" points="` +
    [...bandTop, ...bandBottom].map(([px, py]) => `${px.toFixed(1)},${py.toFixed(1)}`).join(" ") +
    `"/>`;
  const p50line = polyline(series.map((s) => [x(s.week), y(s.p50)]), "#1f5fa8", "fan-p50");
  const p80line = polyline(series.map((s) => [x(s.week), y(s.p80)]), "#7aa7cf", "fan-p80");
  let actual = "";
  if (payload.actual_finish) {
    const ay = y(payload.actual_finish);
    actual =
      `<line class="fan-actual" data-actual="${payload.actual_finish}" ` +
      `x1="${PAD}" y1="${ay.toFixed(1)}" x2="${W - PAD}" y2="${ay.toFixed(1)}" ` +
      `stroke="#b03a2e" stroke-dasharray="6 4"/>` +
      `<text x="${W - PAD + 4}" y="${(ay + 4).toFixed(1)}" class="fan-actual-label">` +
      `${payload.actual_finish}</text>`;
  }
  const marks = series
    .map(
      (s) =>
        `<circle class="fan-point" data-week="${s.week}" data-p50="${s.p50}" data-p80="${s.p80}" ` +
        `cx="${x(s.week).toFixed(1)}" cy="${y(s.p50).toFixed(1)}" r="2.5" fill="#1f5fa8"/>`,
    )
    .join("");
  return frame("Forecast fan (p50-p80, working days)", "fan-chart",
    band + p80line + p50line + marks + actual, payload.version);
}

/** Cumulative PV / EV / AC with the crossover month highlighted. */
export function sCurveChart(payload: EvmPayload): string {
  const curves = payload.curves;
  if (!curves || !curves.periods.length) {
    return frame("Earned-value S-curves", "scurve-chart empty", emptyNote(), payload.version);
  }
  const all = [...curves.pv, ...curves.ev, ...curves.ac];
  const lo = 0;
  const hi = Math.max(...all) * 1.05;
  const x = (p: number) =>
    scale(p, curves.periods[0], curves.periods[curves.periods.length - 1], PAD, W - PAD);
  const y = (v: number) => scale(v, lo, hi, H - PAD, PAD);
  const line = (vals: number[], color: string, cls: string) =>
    polyline(vals.map((v, i) => [x(curves.periods[i]), y(v)]), color, cls);
  let crossover = "";
  if (curves.crossover !== null) {
    const cx = x(curves.crossover);
    crossover =
      `<line class="scurve-crossover" data-crossover="${curves.crossover}" ` +
      `x1="${cx.toFixed(1)}" y1="${PAD}" x2="${cx.toFixed(1)}" y2="${H - PAD}" ` +
      `stroke="#6b8e23" stroke-dasharray="4 4"/>`;
  }
  return frame(
    "Earned-value S-curves (cumulative)",
    "scurve-chart",
    line(curves.pv, "#888888", "scurve-pv") +
      line(curves.ev, "#1f5fa8", "scurve-ev") +
      line(curves.ac, "#b03a2e", "scurve-ac") +
      crossover,
    payload.version,
  );
}

/** Cumulative buffer consumption with the 30% reference terminal marker. */
export function bufferChart(payload: BufferPayload, referencePct = 30): string {
  if (!payload.weeks.length) {
    return frame("Buffer utilization", "buffer-chart empty", emptyNote(), payload.version);
  }
  const size = payload.project_buffer_size ?? 20;
  const weeks = payload.weeks.map((w) => w.week);
  const maxPct = Math.max(referencePct, ...payload.weeks.map((w) => w.percent_used)) * 1.15;
  const x = (w: number) => scale(w, weeks[0], weeks[weeks.length - 1], PAD, W - PAD);
  const y = (pct: number) => scale(pct, 0, maxPct, H - PAD, PAD);
  const projectLine = polyline(
    payload.weeks.map((w) => [x(w.week), y(w.percent_used)]),
    "#1f5fa8",
    "buffer-project",
  );
  const feedingLine = polyline(
    payload.weeks.map((w) => [x(w.week), y((w.cumulative_feeding / size) * 100)]),
    "#7aa7cf",
    "buffer-feeding",
  );
  const refY = y(referencePct);
  const marker =
    `<line class="buffer-30-marker" data-reference-pct="${referencePct}" ` +
    `x1="${PAD}" y1="${refY.toFixed(1)}" x2="${W - PAD}" y2="${refY.toFixed(1)}" ` +
    `stroke="#b03a2e" stroke-dasharray="6 4"/>` +
    `<text class="buffer-30-label" x="${W - PAD + 2}" y="${(refY + 4).toFixed(1)}">` +
    `${referencePct}%</text>`;
  const terminal =
    `<text class="buffer-terminal" data-percent-used="${payload.percent_used.toFixed(1)}" ` +
    `x="${PAD}" y="${H - 10}">project buffer used: ${payload.percent_used.toFixed(1)}%</text>`;
  return frame("Buffer utilization trend (% of project buffer)", "buffer-chart",
    projectLine + feedingLine + marker + terminal, payload.version);
}

/** Baseline vs optimized weekly overtime bars. */
export function overtimeChart(report: OvertimeReport | null, version?: number): string {
  if (!report || !report.weeks.length) {
    return frame("Weekly overtime", "overtime-chart empty", emptyNote(), version);
  }
  const weeks = report.weeks;
  const hi = Math.max(1, ...weeks.map((w) => Math.max(w.baseline, w.optimized))) * 1.1;
  const band = (W - 2 * PAD) / weeks.length;
  const y = (v: number) => scale(v, 0, hi, H - PAD, PAD);
  const bars = weeks
    .map((w, i) => {
      const x0 = PAD + i * band;
      const bh = H - PAD - y(w.baseline);
      const oh = H - PAD - y(w.optimized);
      return (
        `<rect class="ot-baseline" data-week="${w.week}" data-hours="${w.baseline}" ` +
        `x="${(x0 + 2).toFixed(1)}" y="${y(w.baseline).toFixed(1)}" ` +
        `width="${(band * 0.38).toFixed(1)}" height="${bh.toFixed(1)}" fill="#9aa5b1"/>` +
        `<rect class="ot-optimized" data-week="${w.week}" data-hours="${w.optimized}" ` +
        `x="${(x0 + 2 + band * 0.42).toFixed(1)}" y="${y(w.optimized).toFixed(1)}" ` +
        `width="${(band * 0.38).toFixed(1)}" height="${oh.toFixed(1)}" fill="#1f5fa8"/>`
      );
    })
    .join("");
  const caption =
    `<text class="ot-caption" data-reduction-hours="${report.reduction_hours.toFixed(1)}" ` +
    `data-reduction-pct="${report.reduction_pct.toFixed(2)}" x="${PAD}" y="${H - 10}">` +
    `cumulative reduction: ${report.reduction_hours.toFixed(0)} h ` +
    `(${report.reduction_pct.toFixed(1)}%), adoption ` +
    `${report.adoption_rate_pct === null ? "n/a" : report.adoption_rate_pct.toFixed(0) + "%"}</text>`;
  return frame("Weekly overtime: baseline vs optimized (hours)", "overtime-chart",
    bars + caption, version);
}

/** Horizontal signed tornado bars, already ranked by |d_finish_p50|. */
export function tornadoChart(rows: TornadoRow[], version?: number, cls = ""): string {
  if (!rows.length) {
    return frame("What-if tornado", `tornado-chart empty ${cls}`, emptyNote(), version);
  }
  const maxAbs = Math.max(...rows.map((r) => Math.abs(r.d_finish_p50))) || 1;
  const mid = W / 2;
  const rowH = (H - 2 * PAD) / rows.length;
  const bars = rows
    .map((r, i) => {
      const yTop = PAD + i * rowH;
      const len = (Math.abs(r.d_finish_p50) / maxAbs) * (W / 2 - PAD - 10);
      const sign = Math.sign(r.d_finish_p50);
      const xStart = sign >= 0 ? mid : mid - len;
      const fill = sign >= 0 ? "#b03a2e" : "#2e7d32";
      return (
        `<rect class="tornado-bar" data-name="${esc(r.name)}" data-rank="${r.rank}" ` +
        `data-delta="${r.d_finish_p50}" data-direction="${r.direction}" ` +
        `x="${xStart.toFixed(1)}" y="${(yTop + 3).toFixed(1)}" ` +
        `width="${Math.max(len, 1).toFixed(1)}" height="${(rowH * 0.6).toFixed(1)}" fill="${fill}"/>` +
        `<text class="tornado-label" x="${PAD}" y="${(yTop + rowH * 0.55).toFixed(1)}">` +
        `${esc(r.name)} (${r.d_finish_p50 >= 0 ? "+" : ""}${r.d_finish_p50.toFixed(1)} d)</text>`
      );
    })
    .join("");
  const axis = `<line class="tornado-axis" x1="${mid}" y1="${PAD}" x2="${mid}" y2="${H - PAD}" stroke="#444"/>`;
  return frame("What-if sensitivity (delta finish p50, days)",
    `tornado-chart ${cls}`.trim(), axis + bars, version);
}

function emptyNote(): string {
  return `<text class="empty-note" x="${W / 2 - 60}" y="${H / 2}">no data yet</text>`;
}
