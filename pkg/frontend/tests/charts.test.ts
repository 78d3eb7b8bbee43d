import { describe, expect, it } from "vitest";

import {
  bufferChart,
  fanChart,
  overtimeChart,
  sCurveChart,
  tornadoChart,
} from "../src/charts.js";
import type { BufferPayload, ForecastPayload, OvertimeReport, TornadoRow } from "../src/types.js";

function forecastPayload(): ForecastPayload {
  const p50 = [120, 121, 122, 123, 124, 125, 126, 126, 127, 127, 127, 127, 128, 128, 128, 128];
  const p80 = [125, 126, 127, 128, 129, 129, 129, 129, 130, 130, 130, 130, 130, 130, 130, 130];
  return {
    version: 40,
    series: p50.map((v, i) => ({ week: i + 1, p50: v, p80: p80[i], version: 40 })),
    actual_finish: 128,
  };
}

describe("fan chart", () => {
  it("renders one point per week and the actual-finish rule", () => {
    const svg = fanChart(forecastPayload());
    expect(svg.match(/class="fan-point"/g)).toHaveLength(16);
    expect(svg).toContain('data-actual="128"');
    expect(svg).toContain('data-version="40"');
  });

  it("converges to the actual by week 13", () => {
    const svg = fanChart(forecastPayload());
    const match = svg.match(/data-week="13" data-p50="([\d.]+)"/);
    expect(match).not.toBeNull();
    expect(Math.round(Number(match![1]))).toBe(128);
  });

  it("handles an empty project without crashing", () => {
    const svg = fanChart({ version: 0, series: [] });
    expect(svg).toContain("no data yet");
  });
});

describe("s-curves", () => {
  it("marks the crossover month", () => {
    const svg = sCurveChart({
      version: 7,
      curves: {
        periods: [1, 2, 3, 4],
        pv: [1000, 2200, 3500, 5000],
        ev: [920, 2112, 3535, 5150],
        ac: [910.89, 2112, 3607.14, 5049.02],
        crossover: 3,
      },
      metrics: [],
    });
    expect(svg).toContain('data-crossover="3"');
    expect(svg).toContain("scurve-ev");
  });

  it("renders the empty state", () => {
    expect(sCurveChart({ version: 0, metrics: [] })).toContain("no data yet");
  });
});

describe("buffer chart", () => {
  function payload(pct: number): BufferPayload {
    const weeks = Array.from({ length: 16 }, (_, i) => ({
      week: i + 1,
      project_delta: 0.5,
      feeding_delta: 0.5,
      cumulative_project: (pct / 100) * 20 * ((i + 1) / 16),
      cumulative_feeding: 0.5 * (i + 1),
      percent_used: pct * ((i + 1) / 16),
    }));
    return { version: 3, project_buffer_size: 20, feeding_buffer_size: 27, weeks, percent_used: pct };
  }

  it("draws the 30% reference terminal marker", () => {
    const svg = bufferChart(payload(41));
    expect(svg).toContain('class="buffer-30-marker"');
    expect(svg).toContain('data-reference-pct="30"');
    expect(svg).toContain(">30%</text>");
  });

  it("reports the live terminal percent from the payload", () => {
    const svg = bufferChart(payload(41));
    expect(svg).toContain('data-percent-used="41.0"');
  });

  it("renders the empty state", () => {
    expect(bufferChart({ version: 0, weeks: [], percent_used: 0 })).toContain("no data yet");
  });
});

describe("overtime chart", () => {
  function report(optimizedWeek2 = 32): OvertimeReport {
    return {
      weeks: [
        { week: 1, baseline: 0, optimized: 0 },
        { week: 2, baseline: 40, optimized: optimizedWeek2 },
        { week: 3, baseline: 40, optimized: 40 },
      ],
      cumulative_baseline_hours: 80,
      cumulative_optimized_hours: 40 + optimizedWeek2,
      reduction_hours: 40 - optimizedWeek2,
      reduction_pct: ((40 - optimizedWeek2) / 80) * 100,
      adoption_rate_pct: 50,
      proposed: 2,
      adopted: 1,
      final_makespan: 128,
    };
  }

  it("renders paired baseline/optimized bars with raw hours", () => {
    const svg = overtimeChart(report(), 9);
    expect(svg.match(/class="ot-baseline"/g)).toHaveLength(3);
    expect(svg.match(/class="ot-optimized"/g)).toHaveLength(3);
    expect(svg).toContain('data-week="2" data-hours="32"');
    expect(svg).toContain('data-reduction-hours="8.0"');
  });

  it("changes when an adoption lowers a week", () => {
    const before = overtimeChart(report(40), 9);
    const after = overtimeChart(report(32), 9);
    expect(before).not.toEqual(after);
    expect(after).toContain('data-week="2" data-hours="32"');
  });

  it("shows n/a adoption when nothing was proposed", () => {
    const r = report();
    r.adoption_rate_pct = null;
    expect(overtimeChart(r, 1)).toContain("adoption n/a");
  });
});

describe("tornado chart", () => {
  const rows: TornadoRow[] = [
    { rank: 1, name: "drywall-supply-lag", d_finish_p50: 6, d_finish_p80: 8, d_cost_p50: 6.5, d_cost_p80: 8, direction: "delay" },
    { rank: 2, name: "ahu-delivery-late", d_finish_p50: 5, d_finish_p80: 6, d_cost_p50: 4.2, d_cost_p80: 5.5, direction: "delay" },
    { rank: 3, name: "glazing-resequencing", d_finish_p50: -2, d_finish_p80: -1, d_cost_p50: -1.4, d_cost_p80: -0.8, direction: "gain" },
  ];

  it("renders one signed bar per row in rank order", () => {
    const svg = tornadoChart(rows, 5);
    const bars = [...svg.matchAll(/data-name="([^"]+)" data-rank="(\d+)"/g)];
    expect(bars.map((b) => b[1])).toEqual([
      "drywall-supply-lag", "ahu-delivery-late", "glazing-resequencing",
    ]);
  });

  it("draws negative bars left of the axis", () => {
    const svg = tornadoChart(rows, 5);
    const axisX = 320; // mid of the 640-wide canvas
    const neg = svg.match(
      /data-name="glazing-resequencing"[^/]*data-direction="gain"[^/]*x="([\d.]+)"/,
    );
    expect(neg).not.toBeNull();
    expect(Number(neg![1])).toBeLessThan(axisX);
    const pos = svg.match(
      /data-name="drywall-supply-lag"[^/]*data-direction="delay"[^/]*x="([\d.]+)"/,
    );
    expect(Number(pos![1])).toBeGreaterThanOrEqual(axisX);
  });

  it("renders the zero-delta empty state", () => {
    expect(tornadoChart([], 1)).toContain("no data yet");
  });
});
