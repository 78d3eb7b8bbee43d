"""What-if scenarios on a cloned twin: typed perturbations, paired
common-random-number evaluation, and tornado ranking.

Perturbation semantics (working-day finish deltas throughout):
  duration-offset   add days to an activity's duration belief mean
  delivery-offset   late delivery pushes the activity's completion the same
                    number of days; modeled as a mean shift like above
  calendar-hold     dated non-working days; activities whose current
                    deterministic window covers a hold date lose that day
                    (duration +1 per covered date), and the dates join the
                    clone's calendar for date mapping
  resource-delta    pool gains/loses units; dependent activities scale by
                    capacity/(capacity+delta) (a pool-wide slowdown model)
  scope-multiplier  scale duration mean and sd of listed activities; the
                    factor also drives direct-cost deltas
  resequence        remove/add precedence edges; must stay acyclic
"""

from __future__ import annotations

import copy
import datetime as dt
from dataclasses import dataclass, field, replace

from .errors import CycleDetected, SiteTwinError, UnknownActivity
from .forecast import monte_carlo_forecast
from .network import ActivityNetwork, build_network, cpm_pass

PERTURBATION_TYPES = ("duration-offset", "delivery-offset", "calendar-hold",
                      "resource-delta", "scope-multiplier", "resequence")


@dataclass(frozen=True)
class Scenario:
    name: str
    perturbations: tuple
    label: str = ""
    notes: str = ""

    @classmethod
    def from_dict(cls, payload: dict) -> "Scenario":
        perts = []
        for p in payload.get("perturbations", ()):
            if p.get("type") not in PERTURBATION_TYPES:
                raise ValueError(f"unknown perturbation type {p.get('type')!r}")
            if p["type"] == "scope-multiplier" and not p.get("factor", 1.0) > 0:
                raise ValueError("scope factor must be > 0")
            perts.append(dict(p))
        return cls(name=payload["name"], perturbations=tuple(perts),
                   label=payload.get("label", payload["name"]),
                   notes=payload.get("notes", ""))


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    d_finish_p50: float
    d_finish_p80: float
    d_cost_p50: float   # USD x 10^3
    d_cost_p80: float
    notes: str = ""


@dataclass
class SandboxView:
    """The slice of twin state a scenario run needs (already cloned)."""
    network: ActivityNetwork
    beliefs: dict
    resources: dict = field(default_factory=dict)
    overhead_day_rate: float = 1000.0     # USD per working day of slip
    direct_costs: dict = field(default_factory=dict)  # activity -> USD


def apply_scenario(view: SandboxView, scenario: Scenario) -> SandboxView:
    """Deep-clone the view and apply every perturbation; source untouched."""
    clone = SandboxView(
        network=copy.deepcopy(view.network),
        beliefs=dict(view.beliefs),
        resources=dict(view.resources),
        overhead_day_rate=view.overhead_day_rate,
        direct_costs=dict(view.direct_costs),
    )
    scope_direct = 0.0
    for pert in scenario.perturbations:
        kind = pert["type"]
        if kind in ("duration-offset", "delivery-offset"):
            aid = pert["activity"]
            _require_activity(clone.network, aid)
            b = clone.beliefs[aid]
            clone.beliefs[aid] = replace(b, mean=b.mean + float(pert["days"]))
        elif kind == "calendar-hold":
            clone = _apply_hold(clone, tuple(pert["dates"]))
        elif kind == "resource-delta":
            clone = _apply_resource_delta(clone, pert["resource"], float(pert["units"]))
        elif kind == "scope-multiplier":
            factor = float(pert["factor"])
            for aid in pert["activities"]:
                _require_activity(clone.network, aid)
                b = clone.beliefs[aid]
                clone.beliefs[aid] = replace(b, mean=b.mean * factor, sd=b.sd * factor)
                scope_direct += (factor - 1.0) * clone.direct_costs.get(aid, 0.0)
        elif kind == "resequence":
            clone.network = _resequence(clone.network,
                                        pert.get("remove", ()), pert.get("add", ()))
        else:
            raise ValueError(f"unknown perturbation type {kind!r}")
    clone._scope_direct_usd = scope_direct
    return clone


def _require_activity(network, aid):
    if not network.has(aid):
        raise UnknownActivity(f"scenario references unknown activity {aid!r}")


def _apply_hold(view: SandboxView, dates: tuple) -> SandboxView:
    cal = view.network.calendar
    hold_days = [dt.date.fromisoformat(d) for d in dates]
    # which working-day indices do the holds land on, under the current calendar
    det = cpm_pass(view.network, {a: b.mean for a, b in view.beliefs.items()})
    lost = {}
    for day in hold_days:
        if not cal.is_working(day):
            continue
        index = _working_index(cal, day)
        for aid in view.network.ids():
            if det.early_start[aid] <= index < det.early_finish[aid]:
                lost[aid] = lost.get(aid, 0) + 1
    for aid, days in lost.items():
        b = view.beliefs[aid]
        view.beliefs[aid] = replace(b, mean=b.mean + days)
    new_cal = replace(cal, holds=tuple(sorted(set(cal.holds)
                                              | {d.isoformat() for d in hold_days})))
    net = view.network
    view.network = build_network(net.activities, net.precedence, new_cal)
    return view


def _working_index(cal, target: dt.date) -> int:
    day = cal.start_date
    while not cal.is_working(day):
        day += dt.timedelta(days=1)
    index = 0
    while day < target:
        day += dt.timedelta(days=1)
        if cal.is_working(day):
            index += 1
    return index


def _apply_resource_delta(view: SandboxView, resource_id: str, units: float) -> SandboxView:
    res = view.resources.get(resource_id)
    if res is None:
        raise SiteTwinError(f"unknown resource {resource_id!r}")
    capacity = res.capacity if hasattr(res, "capacity") else float(res)
    new_cap = capacity + units
    if new_cap <= 0:
        raise ValueError("resource delta would wipe out the pool")
    factor = capacity / new_cap
    for act in view.network.activities:
        if any(rid == resource_id for rid, _ in act.resource_demands):
            b = view.beliefs[act.id]
            view.beliefs[act.id] = replace(b, mean=b.mean * factor)
    return view


def _resequence(network: ActivityNetwork, remove, add) -> ActivityNetwork:
    edges = [(p, s) for p, s in network.precedence]
    for p, s in remove:
        if (p, s) not in edges:
            raise UnknownActivity(f"resequence: edge {p}->{s} not present")
        edges.remove((p, s))
    for p, s in add:
        if not network.has(p) or not network.has(s):
            raise UnknownActivity(f"resequence: unknown endpoint in {p}->{s}")
        if (p, s) not in edges:
            edges.append((p, s))
    return build_network(network.activities, edges, network.calendar)  # may raise CycleDetected


def evaluate(view: SandboxView, scenario: Scenario, n: int, seed: int) -> ScenarioResult:
    """Paired run: baseline and perturbed forecasts share per-replication draws,
    so an empty scenario yields exactly zero deltas."""
    if n < 1:
        raise ValueError("n must be >= 1")
    base = monte_carlo_forecast(view.network, view.beliefs, n, seed)
    perturbed_view = apply_scenario(view, scenario)
    pert = monte_carlo_forecast(perturbed_view.network, perturbed_view.beliefs, n, seed)

    d50 = pert.p50_finish - base.p50_finish
    d80 = pert.p80_finish - base.p80_finish
    scope_direct = getattr(perturbed_view, "_scope_direct_usd", 0.0)
    rate = view.overhead_day_rate
    d_cost_p50 = (rate * d50 + scope_direct) / 1000.0
    d_cost_p80 = (rate * d80 + scope_direct) / 1000.0
    return ScenarioResult(
        name=scenario.name,
        d_finish_p50=d50, d_finish_p80=d80,
        d_cost_p50=d_cost_p50, d_cost_p80=d_cost_p80,
        notes=scenario.notes,
    )


def tornado(results) -> list:
    """Rank scenario results by |d_finish_p50| descending, sign preserved.

    Equal magnitudes tie-break by name. Output rows are plain dicts ready for
    tabular export.
    """
    if not results:
        raise ValueError("tornado needs at least one result")
    ranked = sorted(results, key=lambda r: (-abs(r.d_finish_p50), r.name))
    return [
        {
            "rank": i + 1,
            "name": r.name,
            "d_finish_p50": r.d_finish_p50,
            "d_finish_p80": r.d_finish_p80,
            "d_cost_p50": r.d_cost_p50,
            "d_cost_p80": r.d_cost_p80,
            "direction": "delay" if r.d_finish_p50 > 0 else
                         ("gain" if r.d_finish_p50 < 0 else "neutral"),
        }
        for i, r in enumerate(ranked)
    ]


def tornado_csv(rows) -> str:
    header = "rank,name,d_finish_p50,d_finish_p80,d_cost_p50,d_cost_p80,direction"
    lines = [header]
    for r in rows:
        lines.append(f"{r['rank']},{r['name']},{r['d_finish_p50']:.3f},"
                     f"{r['d_finish_p80']:.3f},{r['d_cost_p50']:.3f},"
                     f"{r['d_cost_p80']:.3f},{r['direction']}")
    return "\n".join(lines) + "\n"
