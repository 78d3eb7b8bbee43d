/** The seven reference what-if presets and their published reference deltas.
 *
 * Preset definitions feed the scenario builder; the reference deltas render
 * as the benchmark tornado so analysts can compare live twin results against
 * the published sensitivity study. Live numbers always come from the API.
 */

import type { Perturbation, ScenarioSpec, TornadoRow } from "./types.js";

export interface Preset extends ScenarioSpec {
  reference: { d_finish_p50: number; d_finish_p80: number; d_cost_p50: number; d_cost_p80: number };
}

export const PRESETS: Preset[] = [
  {
    name: "drywall-supply-lag",
    label: "Drywall +8% supply lag",
    notes: "Material escalation ripple",
    perturbations: [{ type: "delivery-offset", activity: "A090", days: 3 }],
    reference: { d_finish_p50: 6, d_finish_p80: 8, d_cost_p50: 6.5, d_cost_p80: 8.0 },
  },
  {
    name: "ahu-delivery-late",
    label: "Late AHU delivery (2 weeks)",
    notes: "Affects MEP sequencing",
    perturbations: [{ type: "delivery-offset", activity: "A120", days: 14 }],
    reference: { d_finish_p50: 5, d_finish_p80: 6, d_cost_p50: 4.2, d_cost_p80: 5.5 },
  },
  {
    name: "rain-delay",
    label: "Rain delay (3 critical days)",
    notes: "Lost productivity",
    perturbations: [
      { type: "calendar-hold", dates: ["2025-03-31", "2025-04-01", "2025-04-02"] },
    ],
    reference: { d_finish_p50: 4, d_finish_p80: 4, d_cost_p50: 3.0, d_cost_p80: 4.0 },
  },
  {
    name: "steel-lead-delay",
    label: "Steel lead +1 week",
    notes: "Impacts frame sequence",
    perturbations: [{ type: "delivery-offset", activity: "A020", days: 7 }],
    reference: { d_finish_p50: 4, d_finish_p80: 5, d_cost_p50: 3.5, d_cost_p80: 4.5 },
  },
  {
    name: "electrician-shortage",
    label: "Crew shortage (-1 electrician)",
    notes: "Slows interior works",
    perturbations: [{ type: "resource-delta", resource: "electric", units: -1 }],
    reference: { d_finish_p50: 3, d_finish_p80: 4, d_cost_p50: 2.6, d_cost_p80: 3.5 },
  },
  {
    name: "fireproofing-change-order",
    label: "Fireproofing change order",
    notes: "Added inspections",
    perturbations: [
      { type: "scope-multiplier", activities: ["A060", "A090"], factor: 1.06 },
    ],
    reference: { d_finish_p50: 2, d_finish_p80: 3, d_cost_p50: 2.2, d_cost_p80: 3.0 },
  },
  {
    name: "glazing-resequencing",
    label: "Glazing resequencing",
    notes: "Corridor-first mitigation",
    perturbations: [{ type: "resequence", remove: [["A110", "A170"]], add: [] }],
    reference: { d_finish_p50: -2, d_finish_p80: -1, d_cost_p50: -1.4, d_cost_p80: -0.8 },
  },
];

/** Reference tornado rows: ranked by |delta| descending, ties by name. */
export function referenceTornadoRows(): TornadoRow[] {
  const ranked = [...PRESETS].sort((a, b) => {
    const diff = Math.abs(b.reference.d_finish_p50) - Math.abs(a.reference.d_finish_p50);
    return diff !== 0 ? diff : a.name.localeCompare(b.name);
  });
  return ranked.map((p, i) => ({
    rank: i + 1,
    name: p.name,
    d_finish_p50: p.reference.d_finish_p50,
    d_finish_p80: p.reference.d_finish_p80,
    d_cost_p50: p.reference.d_cost_p50,
    d_cost_p80: p.reference.d_cost_p80,
    direction:
      p.reference.d_finish_p50 > 0 ? "delay" : p.reference.d_finish_p50 < 0 ? "gain" : "neutral",
  }));
}

/** Client-side mirror of the engine's scenario invariants. */
export function validateScenario(spec: ScenarioSpec): string[] {
  const problems: string[] = [];
  if (!spec.name || !spec.name.trim()) problems.push("scenario needs a name");
  if (!spec.perturbations.length) problems.push("add at least one perturbation");
  for (const p of spec.perturbations) {
    problems.push(...validatePerturbation(p));
  }
  return problems;
}

function validatePerturbation(p: Perturbation): string[] {
  const out: string[] = [];
  switch (p.type) {
    case "duration-offset":
    case "delivery-offset":
      if (!p.activity) out.push(`${p.type}: activity is required`);
      if (p.days === undefined || !Number.isFinite(p.days)) {
        out.push(`${p.type}: days must be a finite number`);
      }
      break;
    case "calendar-hold":
      if (!p.dates || !p.dates.length) out.push("calendar-hold: needs dates");
      for (const d of p.dates ?? []) {
        if (!/^\d{4}-\d{2}-\d{2}$/.test(d)) out.push(`calendar-hold: bad date ${d}`);
      }
      break;
    case "resource-delta":
      if (!p.resource) out.push("resource-delta: resource is required");
      if (p.units === undefined || !Number.isFinite(p.units)) {
        out.push("resource-delta: units must be a finite number");
      }
      break;
    case "scope-multiplier":
      if (!p.activities || !p.activities.length) {
        out.push("scope-multiplier: needs activities");
      }
      if (!(p.factor !== undefined && p.factor > 0)) {
        out.push("scope-multiplier: factor must be > 0");
      }
      break;
    case "resequence":
      if (!(p.remove?.length || p.add?.length)) {
        out.push("resequence: needs edges to remove or add");
      }
      break;
    default:
      out.push(`unknown perturbation type ${(p as Perturbation).type}`);
  }
  return out;
}
