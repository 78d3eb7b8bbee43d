"""Activity network, working-day calendar arithmetic, and deterministic CPM.

Durations are real-valued working days throughout; rounding to whole days
happens only at presentation (date mapping).
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field

from .errors import CycleDetected, DanglingEdge, DuplicateId, MissingDuration

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Activity:
    id: str
    name: str = ""
    base_duration: float = 0.0
    resource_demands: tuple = ()  # (resource_id, units_per_day) pairs
    cost_item_refs: tuple = ()

    def __post_init__(self):
        if self.base_duration < 0:
            raise ValueError(f"{self.id}: base_duration must be >= 0")
        for _, units in self.resource_demands:
            if units < 0:
                raise ValueError(f"{self.id}: resource demand must be >= 0")


@dataclass(frozen=True)
class Calendar:
    """Working-day calendar: days-per-week plus dated non-working holds."""

    start_date: dt.date = dt.date(2025, 1, 6)  # a Monday
    workdays_per_week: int = 5
    holds: tuple = ()  # ISO date strings for dated non-working days

    def is_working(self, day: dt.date) -> bool:
        if day.weekday() >= self.workdays_per_week:
            return False
        return day.isoformat() not in self.holds


@dataclass
class ActivityNetwork:
    activities: list
    precedence: list  # (pred_id, succ_id) finish-to-start edges
    calendar: Calendar = field(default_factory=Calendar)
    _order: list = field(default_factory=list, repr=False)  # cached topo order

    def __post_init__(self):
        self._by_id = {a.id: a for a in self.activities}

    def activity(self, activity_id: str) -> Activity:
        return self._by_id[activity_id]

    def ids(self) -> list:
        return [a.id for a in self.activities]

    def has(self, activity_id: str) -> bool:
        return activity_id in self._by_id

    def predecessors(self, activity_id: str) -> list:
        return sorted(p for p, s in self.precedence if s == activity_id)

    def successors(self, activity_id: str) -> list:
        return sorted(s for p, s in self.precedence if p == activity_id)

    def topological_order(self) -> list:
        return list(self._order)

    def sources(self) -> list:
        with_preds = {s for _, s in self.precedence}
        return [a.id for a in self.activities if a.id not in with_preds]

    def sinks(self) -> list:
        with_succs = {p for p, _ in self.precedence}
        return [a.id for a in self.activities if a.id not in with_succs]


@dataclass(frozen=True)
class CpmResult:
    early_start: dict
    early_finish: dict
    late_start: dict
    late_finish: dict
    total_float: dict
    makespan: float
    critical_set: frozenset


def build_network(activities, precedence, calendar=None) -> ActivityNetwork:
    """Validate and assemble an activity network.

    Raises DuplicateId, DanglingEdge, or CycleDetected; on success the
    topological order is computed once and cached on the network.
    """
    seen = set()
    for act in activities:
        if act.id in seen:
            raise DuplicateId(f"duplicate activity id {act.id!r}")
        seen.add(act.id)

    for pred, succ in precedence:
        if pred not in seen:
            raise DanglingEdge(f"edge references unknown id {pred!r}")
        if succ not in seen:
            raise DanglingEdge(f"edge references unknown id {succ!r}")

    order = _topological_sort(seen, precedence)
    net = ActivityNetwork(
        activities=list(activities),
        precedence=[(p, s) for p, s in precedence],
        calendar=calendar or Calendar(),
    )
    net._order = order
    return net


def _topological_sort(ids, edges) -> list:
    succs = {i: [] for i in ids}
    indeg = {i: 0 for i in ids}
    for p, s in edges:
        succs[p].append(s)
        indeg[s] += 1

    ready = sorted(i for i in ids if indeg[i] == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        inserted = False
        for s in sorted(succs[node]):
            indeg[s] -= 1
            if indeg[s] == 0:
                ready.append(s)
                inserted = True
        if inserted:
            ready.sort()

    if len(order) != len(ids):
        raise CycleDetected(_find_cycle(ids, succs, set(order)))
    return order


def _find_cycle(ids, succs, resolved):
    # DFS restricted to nodes still carrying indegree: one cycle is enough.
    remaining = sorted(set(ids) - resolved)
    state = {}
    stack = []

    def visit(node):
        state[node] = 1
        stack.append(node)
        for nxt in sorted(succs[node]):
            if nxt in resolved:
                continue
            if state.get(nxt, 0) == 1:
                i = stack.index(nxt)
                return stack[i:] + [nxt]
            if state.get(nxt, 0) == 0:
                found = visit(nxt)
                if found:
                    return found
        state[node] = 2
        stack.pop()
        return None

    for start in remaining:
        if state.get(start, 0) == 0:
            cycle = visit(start)
            if cycle:
                return cycle
    return remaining  # unreachable in practice


def cpm_pass(network: ActivityNetwork, durations: dict) -> CpmResult:
    """Forward/backward critical-path pass over the network.

    ``durations`` maps every activity id to a working-day duration >= 0.
    Pure function: identical inputs give identical outputs.
    """
    for aid in network.ids():
        if aid not in durations:
            raise MissingDuration(f"no duration for activity {aid!r}")

    order = network.topological_order()
    preds = {aid: [] for aid in order}
    succs = {aid: [] for aid in order}
    for p, s in network.precedence:
        preds[s].append(p)
        succs[p].append(s)

    es, ef = {}, {}
    for aid in order:
        es[aid] = max((ef[p] for p in preds[aid]), default=0.0)
        ef[aid] = es[aid] + durations[aid]

    makespan = max((ef[aid] for aid in network.sinks()), default=0.0)

    ls, lf = {}, {}
    for aid in reversed(order):
        lf[aid] = min((ls[s] for s in succs[aid]), default=makespan)
        ls[aid] = lf[aid] - durations[aid]

    total_float = {aid: ls[aid] - es[aid] for aid in order}
    critical = frozenset(aid for aid in order if total_float[aid] <= FLOAT_TOL)
    return CpmResult(
        early_start=es,
        early_finish=ef,
        late_start=ls,
        late_finish=lf,
        total_float=total_float,
        makespan=makespan,
        critical_set=critical,
    )


def calendar_to_date(network: ActivityNetwork, working_day_index: float) -> dt.date:
    """Map a working-day offset to a calendar date, skipping weekends and holds.

    Fractional offsets round up: day 0.2 still occupies the first working day.
    Index 0 is the project start date (assumed a working day).
    """
    if working_day_index < 0:
        raise ValueError("working_day_index must be >= 0")
    cal = network.calendar
    remaining = int(working_day_index) if working_day_index == int(working_day_index) \
        else int(working_day_index) + 1
    day = cal.start_date
    while not cal.is_working(day):
        day += dt.timedelta(days=1)
    while remaining > 0:
        day += dt.timedelta(days=1)
        if cal.is_working(day):
            remaining -= 1
    return day


# ---------------------------------------------------------------------------
# Persistence. Field names here are the contract documented in docs/formats.md;
# round-trip load() -> save() is byte-stable because keys are emitted sorted.

def network_to_dict(network: ActivityNetwork) -> dict:
    return {
        "activities": [
            {
                "id": a.id,
                "name": a.name,
                "base_duration": a.base_duration,
                "resource_demands": [[r, u] for r, u in a.resource_demands],
                "cost_item_refs": list(a.cost_item_refs),
            }
            for a in network.activities
        ],
        "edges": [[p, s] for p, s in network.precedence],
        "calendar": {
            "start_date": network.calendar.start_date.isoformat(),
            "workdays_per_week": network.calendar.workdays_per_week,
            "holds": list(network.calendar.holds),
        },
    }


def network_from_dict(payload: dict) -> ActivityNetwork:
    cal = payload.get("calendar", {})
    calendar = Calendar(
        start_date=dt.date.fromisoformat(cal.get("start_date", "2025-01-06")),
        workdays_per_week=int(cal.get("workdays_per_week", 5)),
        holds=tuple(cal.get("holds", ())),
    )
    activities = [
        Activity(
            id=a["id"],
            name=a.get("name", ""),
            base_duration=float(a["base_duration"]),
            resource_demands=tuple((r, float(u)) for r, u in a.get("resource_demands", ())),
            cost_item_refs=tuple(a.get("cost_item_refs", ())),
        )
        for a in payload["activities"]
    ]
    edges = [(p, s) for p, s in payload["edges"]]
    return build_network(activities, edges, calendar)


def save_network(network: ActivityNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(network), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_network(path) -> ActivityNetwork:
    with open(path, encoding="utf-8") as fh:
        return network_from_dict(json.load(fh))
