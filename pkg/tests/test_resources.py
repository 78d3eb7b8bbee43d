import itertools

import numpy as np
import pytest

from sitetwin.resources import (Action, LookaheadInstance, Resource, WindowTask,
                                apply_action, baseline_schedule, candidate_actions,
                                predicted_delta)


def res(rid="crew", cap=8.0, ot=160.0):
    return Resource(id=rid, capacity=cap, overtime_cap=ot)


def inst(tasks, resources=None, days=5, week=1):
    resources = resources or {"crew": res()}
    return LookaheadInstance(week=week, horizon=1, days=days,
                             tasks=tuple(tasks), resources=resources)


def task(aid, dur, units, preds=(), slack=0.0, rid="crew"):
    return WindowTask(activity_id=aid, duration=dur, demands=((rid, units),),
                      preds=preds, slack=slack)


def test_no_contention_no_overtime():
    out = baseline_schedule(inst([task("A", 3, 4), task("B", 2, 4)]))
    assert out.overtime_hours == 0.0
    assert out.slip_days == 0


def test_overtime_above_capacity_capped():
    # demand 10 on capacity 8 -> 2 units/day over; 3 days -> 2*8h*3 = 48h
    instance = inst([task("A", 3, 10)], {"crew": res(cap=8, ot=60)})
    out = baseline_schedule(instance)
    assert out.overtime_hours == pytest.approx(48.0)


def test_demand_beyond_overtime_cap_delays():
    # two tasks each needing 6 of 8; together 12 > 8 with zero overtime cap:
    # serial placement, second task delayed after the first
    instance = inst([task("A", 2, 6), task("B", 2, 6)], {"crew": res(cap=8, ot=0)})
    out = baseline_schedule(instance)
    assert out.overtime_hours == 0.0
    assert out.starts["B"] >= out.finishes["A"] or out.starts["A"] >= out.finishes["B"]


def test_precedence_respected():
    out = baseline_schedule(inst([task("A", 2, 4), task("B", 2, 4, preds=("A",))]))
    assert out.starts["B"] >= out.finishes["A"]


def exhaustive_best(instance, metric="overtime"):
    """Oracle: best schedule over every precedence-feasible insertion order."""
    tasks = list(instance.tasks)
    best_ot, best_finish = float("inf"), float("inf")
    for perm in itertools.permutations(tasks):
        seen = set()
        ok = True
        for t in perm:
            if any(p not in seen for p in t.preds):
                ok = False
                break
            seen.add(t.activity_id)
        if not ok:
            continue
        out = baseline_schedule(instance, order=perm)
        best_ot = min(best_ot, out.overtime_hours)
        best_finish = min(best_finish, max(out.finishes.values()))
    return best_ot, best_finish


def test_min_slack_matches_exhaustive_minimum_on_4_activities():
    tasks = [task("A", 2, 5, slack=0.0), task("B", 2, 5, slack=4.0),
             task("C", 1, 4, preds=("A",), slack=0.0), task("D", 3, 3, slack=6.0)]
    instance = inst(tasks, {"crew": res(cap=8, ot=0)}, days=8)
    best_ot, best_finish = exhaustive_best(instance)
    out = baseline_schedule(instance, "min-slack")
    assert out.overtime_hours == pytest.approx(best_ot)
    assert max(out.finishes.values()) == best_finish


def random_instance(rng, n_tasks):
    tasks = []
    ids = [f"T{i}" for i in range(n_tasks)]
    for i, tid in enumerate(ids):
        preds = tuple(p for p in ids[:i] if rng.random() < 0.25)
        tasks.append(WindowTask(
            activity_id=tid,
            duration=int(rng.integers(1, 4)),
            demands=(("crew", float(rng.integers(2, 7))),),
            preds=preds,
            slack=float(rng.integers(0, 8))))
    cap = float(rng.integers(5, 9))
    ot_cap = float(rng.choice([0, 16, 40]))
    return LookaheadInstance(week=1, horizon=1, days=10, tasks=tuple(tasks),
                             resources={"crew": Resource("crew", cap, ot_cap)})


def test_rcpsp_oracle_50_instances():
    """Exhaustive oracle never beaten; best rule matches >= 60% of instances."""
    rng = np.random.Generator(np.random.Philox(key=4242))
    matches = 0
    total = 50
    for _ in range(total):
        instance = random_instance(rng, int(rng.integers(3, 7)))
        best_ot, _ = exhaustive_best(instance)
        rule_ots = [baseline_schedule(instance, rule).overtime_hours
                    for rule in ("min-slack", "shortest-duration", "most-demand")]
        best_rule = min(rule_ots)
        assert best_rule >= best_ot - 1e-9  # a single ordering can't beat the min
        if best_rule == pytest.approx(best_ot):
            matches += 1
    assert matches >= 0.6 * total, f"only {matches}/{total} matched the oracle"


def test_apply_action_add_shift_reduces_overtime():
    instance = inst([task("A", 5, 10)], {"crew": res(cap=8, ot=200)})
    delta = predicted_delta(instance, Action(kind="add-shift", resource="crew",
                                             units=1.0, days=5))
    assert delta == pytest.approx(-40.0)  # one unit less overtime, 5 days * 8h


def test_apply_action_split_cuts_demand():
    instance = inst([task("A", 5, 10, slack=3.0)], {"crew": res(cap=8, ot=200)})
    after = apply_action(instance, Action(kind="split", target="A", units=1.0, days=5))
    assert after.tasks[0].demands[0][1] == pytest.approx(9.0)
    assert instance.tasks[0].demands[0][1] == 10.0  # original untouched


def test_apply_action_resequence_swaps_priority():
    instance = inst([task("A", 2, 6, slack=0.0), task("B", 2, 6, slack=5.0)],
                    {"crew": res(cap=8, ot=0)})
    first = baseline_schedule(instance)
    assert first.starts["A"] < first.starts["B"]
    swapped = apply_action(instance, Action(kind="resequence", target="B", other="A"))
    second = baseline_schedule(swapped)
    assert second.starts["B"] < second.starts["A"]


def test_no_op_identity():
    instance = inst([task("A", 2, 4)])
    assert apply_action(instance, Action(kind="no-op")) is instance


def test_candidate_actions_cover_conflict():
    instance = inst([task("A", 5, 10, slack=2.0)], {"crew": res(cap=8, ot=200)})
    kinds = {c.kind for c in candidate_actions(instance)}
    assert "no-op" in kinds
    assert "add-shift" in kinds


def test_candidates_no_conflict_mostly_noop():
    instance = inst([task("A", 3, 4)])
    cands = candidate_actions(instance)
    assert [c.kind for c in cands if c.kind == "no-op"] == ["no-op"]
    deltas = [predicted_delta(instance, c) for c in cands]
    assert all(d >= 0.0 for d in deltas)  # nothing to save
