/** Payload types mirroring the twin service API (the dashboard view model). */

export interface ForecastPoint {
  week: number;
  p50: number;
  p80: number;
  version: number;
}

export interface ForecastPayload {
  version: number;
  series: ForecastPoint[];
  latest_histogram?: [number, number][];
  prior?: { p50: number; p80: number; histogram: [number, number][] };
  actual_finish?: number | null;
}

export interface EvmMetricRow {
  period: number;
  spi: number;
  cpi: number;
  sv_pct: number;
  cv_pct: number;
}

export interface EvmPayload {
  version: number;
  curves?: {
    periods: number[];
    pv: number[];
    ev: number[];
    ac: number[];
    crossover: number | null;
  };
  metrics: EvmMetricRow[];
  quantities?: {
    work_package: string;
    planned: number;
    measured: number;
    variance_pct: number;
  }[];
}

export interface BufferWeekRow {
  week: number;
  project_delta: number;
  feeding_delta: number;
  cumulative_project: number;
  cumulative_feeding: number;
  percent_used: number;
}

export interface BufferPayload {
  version: number;
  project_buffer_size?: number;
  feeding_buffer_size?: number;
  weeks: BufferWeekRow[];
  percent_used: number;
}

export interface RecommendationRow {
  action_id: string;
  week: number;
  summary: string;
  kind: string;
  predicted_overtime_delta: number;
  status: "proposed" | "adopted" | "rejected";
  reason: string;
}

export interface RecommendationsPayload {
  version: number;
  recommendations: RecommendationRow[];
}

export interface OvertimeWeekRow {
  week: number;
  baseline: number;
  optimized: number;
}

export interface OvertimeReport {
  weeks: OvertimeWeekRow[];
  cumulative_baseline_hours: number;
  cumulative_optimized_hours: number;
  reduction_hours: number;
  reduction_pct: number;
  adoption_rate_pct: number | null;
  proposed: number;
  adopted: number;
  final_makespan: number | null;
}

export interface ProjectPayload {
  project_id: string;
  version: number;
  weeks_run: number[];
  activities: string[];
  overtime: OvertimeReport | null;
  decision_log: Record<string, unknown>[];
}

export interface TornadoRow {
  rank: number;
  name: string;
  d_finish_p50: number;
  d_finish_p80: number;
  d_cost_p50: number;
  d_cost_p80: number;
  direction: "delay" | "gain" | "neutral";
}

export interface TornadoPayload {
  version: number;
  rows: TornadoRow[];
}

export interface Perturbation {
  type:
    | "duration-offset"
    | "delivery-offset"
    | "calendar-hold"
    | "resource-delta"
    | "scope-multiplier"
    | "resequence";
  activity?: string;
  days?: number;
  dates?: string[];
  resource?: string;
  units?: number;
  activities?: string[];
  factor?: number;
  remove?: [string, string][];
  add?: [string, string][];
}

export interface ScenarioSpec {
  name: string;
  label?: string;
  notes?: string;
  perturbations: Perturbation[];
}

export interface ScenarioResultPayload {
  version: number;
  result: {
    name: string;
    d_finish_p50: number;
    d_finish_p80: number;
    d_cost_p50: number;
    d_cost_p80: number;
    notes: string;
  };
}
