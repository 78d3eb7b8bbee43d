import { describe, expect, it } from "vitest";

import {
  conflictBanner,
  renderInbox,
  renderScenarioBuilder,
  renderScenarioResult,
  renderViews,
} from "../src/views.js";
import type { ProjectPayload, RecommendationsPayload } from "../src/types.js";

function project(): ProjectPayload {
  return {
    project_id: "dfw-midrise",
    version: 55,
    weeks_run: [1, 2, 3],
    activities: ["A001"],
    overtime: {
      weeks: [
        { week: 1, baseline: 0, optimized: 0 },
        { week: 2, baseline: 40, optimized: 32 },
        { week: 3, baseline: 40, optimized: 40 },
      ],
      cumulative_baseline_hours: 80,
      cumulative_optimized_hours: 72,
      reduction_hours: 8,
      reduction_pct: 10,
      adoption_rate_pct: 100,
      proposed: 1,
      adopted: 1,
      final_makespan: 128,
    },
    decision_log: [],
  };
}

function recs(status: "proposed" | "adopted" | "rejected"): RecommendationsPayload {
  return {
    version: 55,
    recommendations: [
      {
        action_id: "RL-002",
        week: 2,
        summary: "Start formwork support shift a day early",
        kind: "add-shift",
        predicted_overtime_delta: -8,
        status,
        reason: status === "rejected" ? "Overtime cap" : "",
      },
    ],
  };
}

describe("views", () => {
  it("renders all five chart panels plus the reference tornado", () => {
    const html = renderViews({
      project: project(),
      forecast: { version: 55, series: [{ week: 1, p50: 120, p80: 125, version: 55 }] },
      evm: { version: 55, metrics: [] },
      buffers: { version: 55, weeks: [], percent_used: 0 },
      tornadoRows: [],
      selectedWeek: null,
    });
    for (const cls of ["panel-forecast", "panel-scurve", "panel-buffer",
                       "panel-overtime", "panel-tornado-live", "panel-tornado-reference"]) {
      expect(html).toContain(cls);
    }
    expect(html).toContain("week-select");
  });

  it("stamps the API version on the rendered state", () => {
    const html = renderViews({
      project: project(),
      forecast: { version: 55, series: [] },
      evm: { version: 55, metrics: [] },
      buffers: { version: 55, weeks: [], percent_used: 0 },
      tornadoRows: [],
      selectedWeek: null,
    });
    expect(html).toContain('data-version="55"');
    expect(html).toContain("v55");
  });

  it("week selector slices the overtime series", () => {
    const base = {
      project: project(),
      forecast: { version: 55, series: [] },
      evm: { version: 55, metrics: [] },
      buffers: { version: 55, weeks: [], percent_used: 0 },
      tornadoRows: [],
    };
    const all = renderViews({ ...base, selectedWeek: null });
    const w1 = renderViews({ ...base, selectedWeek: 1 });
    expect(all).toContain('data-week="3" data-hours="40"');
    expect(w1).not.toContain('data-week="3"');
  });
});

describe("inbox", () => {
  it("shows adopt/reject controls for proposed items", () => {
    const html = renderInbox(recs("proposed"));
    expect(html).toContain('class="adopt"');
    expect(html).toContain('class="reject"');
    expect(html).toContain('data-version="55"');
    expect(html).toContain('data-proposed="1"');
  });

  it("shows the decided status and stored reason instead of buttons", () => {
    const html = renderInbox(recs("rejected"));
    expect(html).not.toContain('class="adopt"');
    expect(html).toContain("rejected: Overtime cap");
    const adopted = renderInbox(recs("adopted"));
    expect(adopted).toContain('data-status="adopted"');
  });
});

describe("scenario builder", () => {
  it("offers the seven presets and an evaluate button", () => {
    const html = renderScenarioBuilder();
    expect(html.match(/<option value="[a-z-]+">/g)).toHaveLength(7);
    expect(html).toContain("evaluate-scenario");
  });

  it("surfaces validation problems", () => {
    const html = renderScenarioBuilder(["scope-multiplier: factor must be > 0"]);
    expect(html).toContain("form-errors");
    expect(html).toContain("factor must be &gt; 0");
  });

  it("renders a signed scenario outcome", () => {
    const html = renderScenarioResult({
      name: "rain-delay", d_finish_p50: 3.0, d_finish_p80: 3.0,
      d_cost_p50: 3.0, d_cost_p80: 3.0,
    });
    expect(html).toContain("+3.0 d (p50)");
    expect(html).toContain('data-d-finish-p50="3"');
  });
});

describe("banners", () => {
  it("conflict banner prompts a refresh", () => {
    expect(conflictBanner()).toContain("version conflict");
    expect(conflictBanner()).toContain("refresh");
  });
});
