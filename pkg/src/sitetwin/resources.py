"""Weekly look-ahead resource scheduling: serial schedule generation under
capacity and overtime caps, typed leveling actions, and overtime accounting.

Units: resource demand and capacity are crew-units per day; one unit-day is
HOURS_PER_DAY hours. Overtime is the unit-hours scheduled above capacity,
limited per resource by its weekly overtime cap; demand beyond cap + overtime
delays the activity instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import SiteTwinError

HOURS_PER_DAY = 8.0
PRIORITY_RULES = ("min-slack", "shortest-duration", "most-demand")
ACTION_TYPES = ("no-op", "shift-crew", "add-shift", "merge", "resequence",
                "split", "pre-stage")


class EmptyWindow(SiteTwinError):
    pass


class AlreadyDecided(SiteTwinError):
    pass


class MakespanDegradation(SiteTwinError):
    """Adopting the action would push out the forecast finish."""


@dataclass(frozen=True)
class Resource:
    id: str
    capacity: float            # units per day
    overtime_cap: float = 0.0  # hours per week
    hourly_cost: float = 0.0

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"{self.id}: capacity must be > 0")
        if self.overtime_cap < 0:
            raise ValueError(f"{self.id}: overtime_cap must be >= 0")


@dataclass(frozen=True)
class WindowTask:
    activity_id: str
    duration: int                  # whole days of work inside the window
    demands: tuple                 # (resource_id, units per day)
    preds: tuple = ()              # predecessor ids within the instance
    slack: float = 0.0             # total float from the network CPM


@dataclass(frozen=True)
class LookaheadInstance:
    week: int
    horizon: int                   # weeks
    days: int                      # scheduling days in the window
    tasks: tuple
    resources: dict                # id -> Resource

    def task(self, activity_id: str) -> WindowTask:
        for t in self.tasks:
            if t.activity_id == activity_id:
                return t
        raise KeyError(activity_id)


@dataclass(frozen=True)
class ScheduleResult:
    starts: dict                   # activity -> start day
    finishes: dict                 # activity -> finish day (exclusive)
    overtime_hours: float
    idle_hours: float
    slip_days: int                 # days scheduled past the window end
    usage: dict                    # resource -> list of units per day


@dataclass(frozen=True)
class Action:
    """A typed resource-leveling move with its concrete parameters.

    kind: one of ACTION_TYPES. Parameter semantics:
      shift-crew: move `units` of capacity from `resource_from` to `resource`
      add-shift / pre-stage: add `units` of capacity on `days` days
      merge / split: cut `units` of demand on activity `target` for `days` days
      resequence: swap scheduling priority of `target` and `other`
    """
    kind: str
    resource: str = None
    resource_from: str = None
    target: str = None
    other: str = None
    units: float = 0.0
    days: int = 0

    def describe(self) -> str:
        if self.kind == "no-op":
            return "hold current plan"
        if self.kind == "add-shift":
            return f"add {self.units:g}-unit shift on {self.resource} for {self.days}d"
        if self.kind == "pre-stage":
            return f"pre-stage {self.resource} (+{self.units:g} units, {self.days}d)"
        if self.kind == "shift-crew":
            return f"shift {self.units:g} crew {self.resource_from}->{self.resource}"
        if self.kind == "merge":
            return f"merge work on {self.target} (-{self.units:g} units/d, {self.days}d)"
        if self.kind == "split":
            return f"split {self.target} crew (-{self.units:g} units/d, {self.days}d)"
        return f"resequence {self.target} ahead of {self.other}"


@dataclass
class Recommendation:
    action_id: str
    week: int
    action: Action
    summary: str
    predicted_overtime_delta: float
    status: str = "proposed"       # proposed | adopted | rejected
    reason: str = ""

    def decided(self) -> bool:
        return self.status != "proposed"


# ---------------------------------------------------------------------------
# Serial schedule generation

def _rule_key(rule: str):
    if rule == "min-slack":
        return lambda t: (t.slack, t.activity_id)
    if rule == "shortest-duration":
        return lambda t: (t.duration, t.activity_id)
    if rule == "most-demand":
        return lambda t: (-sum(u for _, u in t.demands), t.activity_id)
    raise ValueError(f"unknown priority rule {rule!r}")


def _sgs_sequence(instance: LookaheadInstance, rule: str):
    """Serial selection: repeatedly take the best-priority eligible task."""
    key = _rule_key(rule)
    remaining = {t.activity_id: t for t in instance.tasks}
    scheduled = set()
    sequence = []
    while remaining:
        eligible = [t for t in remaining.values()
                    if all(p in scheduled for p in t.preds)]
        if not eligible:
            raise SiteTwinError("precedence deadlock in look-ahead window")
        chosen = min(eligible, key=key)
        sequence.append(chosen)
        scheduled.add(chosen.activity_id)
        del remaining[chosen.activity_id]
    return sequence


def baseline_schedule(instance: LookaheadInstance, priority_rule: str = "min-slack",
                      order=None) -> ScheduleResult:
    """Serial SGS: place tasks in priority order at the earliest start that is
    precedence-feasible and fits capacity plus remaining weekly overtime.

    ``order`` overrides rule-based selection with an explicit precedence-
    feasible insertion order (used by the exhaustive-search oracle).
    """
    if order is not None:
        tasks = list(order)
        seen = set()
        for t in tasks:
            if any(p not in seen for p in t.preds):
                raise SiteTwinError("explicit order violates precedence")
            seen.add(t.activity_id)
    else:
        tasks = _sgs_sequence(instance, priority_rule)
    horizon_days = max(instance.days, 1)
    # allow spill past the window so everything schedules; spill counts as slip
    max_days = horizon_days + sum(max(t.duration, 1) for t in tasks) + 1

    caps = {r.id: r.capacity for r in instance.resources.values()}
    ot_caps = {r.id: r.overtime_cap for r in instance.resources.values()}
    usage = {rid: [0.0] * max_days for rid in caps}
    ot_used = {rid: [0.0] * ((max_days // 5) + 2) for rid in caps}  # per week, hours

    finishes, starts = {}, {}

    def fits(task, start):
        extra_ot = {}
        for d in range(start, start + task.duration):
            week = d // 5
            for rid, units in task.demands:
                if rid not in caps:
                    raise SiteTwinError(f"unknown resource {rid!r}")
                new_level = usage[rid][d] + units
                over = max(0.0, new_level - caps[rid]) * HOURS_PER_DAY
                prev_over = max(0.0, usage[rid][d] - caps[rid]) * HOURS_PER_DAY
                added = over - prev_over
                if added > 0:
                    key = (rid, week)
                    extra_ot[key] = extra_ot.get(key, 0.0) + added
                    if ot_used[rid][week] + extra_ot[key] > ot_caps[rid] + 1e-9:
                        return None
        return extra_ot

    for task in tasks:
        earliest = max((finishes.get(p, 0) for p in task.preds), default=0)
        if task.duration == 0:
            starts[task.activity_id] = earliest
            finishes[task.activity_id] = earliest
            continue
        start = earliest
        while True:
            if start + task.duration > max_days:
                raise SiteTwinError("window overflow; instance is malformed")
            extra = fits(task, start)
            if extra is not None:
                break
            start += 1
        for d in range(start, start + task.duration):
            for rid, units in task.demands:
                usage[rid][d] += units
        for (rid, week), hours in extra.items():
            ot_used[rid][week] += hours
        starts[task.activity_id] = start
        finishes[task.activity_id] = start + task.duration

    last = max(finishes.values(), default=0)
    overtime = 0.0
    idle = 0.0
    for rid in caps:
        used_days = [d for d in range(last) if usage[rid][d] > 0]
        for d in range(last):
            overtime += max(0.0, usage[rid][d] - caps[rid]) * HOURS_PER_DAY
        for d in used_days:
            idle += max(0.0, caps[rid] - usage[rid][d]) * HOURS_PER_DAY
    slip = max(0, last - horizon_days)
    return ScheduleResult(
        starts=starts, finishes=finishes, overtime_hours=overtime,
        idle_hours=idle, slip_days=slip,
        usage={rid: cols[:last] for rid, cols in usage.items()},
    )


def apply_action(instance: LookaheadInstance, action: Action) -> LookaheadInstance:
    """Return the instance with the action's effect applied (pure)."""
    if action.kind == "no-op":
        return instance
    resources = dict(instance.resources)
    tasks = list(instance.tasks)
    days_limit = action.days if action.days > 0 else instance.days

    if action.kind in ("add-shift", "pre-stage"):
        res = resources[action.resource]
        # capacity bump prorated: extra units available on `days` of the window
        bump = action.units * min(days_limit, instance.days) / max(instance.days, 1)
        resources[action.resource] = replace(res, capacity=res.capacity + bump)
    elif action.kind == "shift-crew":
        src = resources[action.resource_from]
        dst = resources[action.resource]
        moved = min(action.units, src.capacity - 0.5)
        frac = min(days_limit, instance.days) / max(instance.days, 1)
        resources[action.resource_from] = replace(src, capacity=src.capacity - moved * frac)
        resources[action.resource] = replace(dst, capacity=dst.capacity + moved * frac)
    elif action.kind in ("merge", "split"):
        for i, t in enumerate(tasks):
            if t.activity_id == action.target:
                frac = min(days_limit, max(t.duration, 1)) / max(t.duration, 1)
                new_demands = tuple(
                    (rid, max(0.0, u - action.units * frac)) for rid, u in t.demands)
                tasks[i] = replace(t, demands=new_demands)
                break
        else:
            raise KeyError(action.target)
    elif action.kind == "resequence":
        ids = [t.activity_id for t in tasks]
        if action.target not in ids or action.other not in ids:
            raise KeyError(f"{action.target} / {action.other}")
        # swap scheduling priorities: under the slack-driven rule the two
        # tasks trade places in the serial selection
        i, j = ids.index(action.target), ids.index(action.other)
        si, sj = tasks[i].slack, tasks[j].slack
        tasks[i] = replace(tasks[i], slack=sj)
        tasks[j] = replace(tasks[j], slack=si)
    else:
        raise ValueError(f"unknown action kind {action.kind!r}")
    return replace(instance, tasks=tuple(tasks), resources=resources)


def predicted_delta(instance: LookaheadInstance, action: Action,
                    priority_rule: str = "min-slack") -> float:
    """One-step simulation: overtime change if the action were applied."""
    before = baseline_schedule(instance, priority_rule)
    after = baseline_schedule(apply_action(instance, action), priority_rule)
    return after.overtime_hours - before.overtime_hours


def candidate_actions(instance: LookaheadInstance,
                      priority_rule: str = "min-slack") -> list:
    """Concrete feasible candidates for each action type on this instance."""
    base = baseline_schedule(instance, priority_rule)
    overloaded = []
    for rid, cols in base.usage.items():
        cap = instance.resources[rid].capacity
        over_days = sum(1 for u in cols if u > cap + 1e-9)
        if over_days:
            overloaded.append((rid, over_days))
    idle_pools = [rid for rid, cols in base.usage.items()
                  if cols and max(cols) < instance.resources[rid].capacity - 0.9]

    cands = [Action(kind="no-op")]
    for rid, over_days in overloaded:
        cands.append(Action(kind="add-shift", resource=rid, units=1.0,
                            days=min(over_days, instance.days)))
        cands.append(Action(kind="pre-stage", resource=rid, units=0.5,
                            days=min(over_days, instance.days)))
        for src in idle_pools:
            if src != rid:
                cands.append(Action(kind="shift-crew", resource=rid,
                                    resource_from=src, units=1.0, days=instance.days))
                break
        heavy = [t for t in instance.tasks
                 if any(r == rid for r, _ in t.demands) and t.slack > 0]
        heavy.sort(key=lambda t: -max(u for r, u in t.demands if r == rid))
        if heavy:
            cands.append(Action(kind="split", target=heavy[0].activity_id,
                                units=1.0, days=min(over_days, instance.days)))
            if len(heavy) > 1:
                cands.append(Action(kind="merge", target=heavy[1].activity_id,
                                    units=0.5, days=min(over_days, instance.days)))
    tasks = sorted(instance.tasks, key=lambda t: t.slack)
    if len(tasks) >= 2 and not tasks[0].preds and not tasks[1].preds:
        cands.append(Action(kind="resequence", target=tasks[-1].activity_id,
                            other=tasks[0].activity_id))
    return cands
