"""Tabular Q-learning recommender for weekly resource leveling.

The learner is generic over a small environment protocol (reset/step/actions)
so it can be validated on toy MDPs with known optima; the scheduling
environment discretizes look-ahead instances into (phase, utilization,
critical-lag) states and exposes the typed action vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .resources import (ACTION_TYPES, LookaheadInstance, baseline_schedule,
                        candidate_actions, predicted_delta, apply_action,
                        Action, Recommendation)


@dataclass
class Policy:
    q_table: dict = field(default_factory=dict)   # state -> {action_key: value}
    episodes: int = 0
    seed: int = 0
    reward_weights: tuple = (1.0, 0.5, 10.0)      # overtime, idle, slip

    def value(self, state, action_key) -> float:
        return self.q_table.get(state, {}).get(action_key, 0.0)

    def greedy(self, state, action_keys) -> str:
        vals = self.q_table.get(state, {})
        best = max(action_keys, key=lambda a: (vals.get(a, 0.0), a))
        return best


def q_learning(env_factory, episodes: int, seed: int, alpha: float = 0.2,
               gamma: float = 0.95, eps_start: float = 0.9,
               eps_end: float = 0.05, max_steps: int = 200) -> Policy:
    """Off-policy TD control with a linearly decaying epsilon-greedy schedule.

    ``env_factory(rng)`` builds one episode's environment. Deterministic for a
    fixed seed: exploration, env randomness, and tie-breaks all flow from the
    seeded generator.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed))
    q = {}

    def q_get(s, a):
        return q.setdefault(s, {}).setdefault(a, 0.0)

    for ep in range(episodes):
        eps = eps_start + (eps_end - eps_start) * (ep / max(episodes - 1, 1))
        env = env_factory(rng)
        state = env.reset(rng)
        for _ in range(max_steps):
            actions = env.actions(state)
            if not actions:
                break
            if rng.random() < eps:
                action = actions[int(rng.integers(len(actions)))]
            else:
                vals = q.get(state, {})
                best_v = max(vals.get(a, 0.0) for a in actions)
                action = min(a for a in actions if vals.get(a, 0.0) == best_v)
            next_state, reward, done = env.step(state, action, rng)
            q_get(state, action)
            if done:
                target = reward
            else:
                nxt = env.actions(next_state)
                target = reward + gamma * max((q_get(next_state, a) for a in nxt),
                                              default=0.0)
            q[state][action] = (1 - alpha) * q[state][action] + alpha * target
            state = next_state
            if done:
                break
    return Policy(q_table=q, episodes=episodes, seed=seed)


# ---------------------------------------------------------------------------
# Scheduling environment: one-step episodes (pick one move for the week)

def schedule_cost(result, weights=(1.0, 0.5, 10.0)) -> float:
    w_ot, w_idle, w_slip = weights
    return (w_ot * result.overtime_hours + w_idle * result.idle_hours
            + w_slip * result.slip_days)


def discretize_state(instance: LookaheadInstance, total_weeks: int = 26) -> tuple:
    phase_f = instance.week / max(total_weeks, 1)
    phase = "early" if phase_f < 0.33 else ("mid" if phase_f < 0.67 else "late")
    base = baseline_schedule(instance)
    util = 0.0
    for rid, cols in base.usage.items():
        cap = instance.resources[rid].capacity
        if cols:
            util = max(util, max(cols) / cap)
    util_bucket = "low" if util < 0.9 else ("balanced" if util <= 1.1 else "over")
    min_slack = min((t.slack for t in instance.tasks), default=0.0)
    lag = "behind" if min_slack < 0 else ("tight" if min_slack <= 5 else "free")
    return (phase, util_bucket, lag)


class SchedulingEnv:
    """One decision per episode: choose an action type for the instance."""

    def __init__(self, instance: LookaheadInstance, weights=(1.0, 0.5, 10.0),
                 total_weeks: int = 26):
        self.instance = instance
        self.weights = weights
        self.total_weeks = total_weeks
        self._candidates = candidate_actions(instance)
        self._by_kind = {}
        for cand in self._candidates:
            self._by_kind.setdefault(cand.kind, []).append(cand)

    def reset(self, rng):
        return discretize_state(self.instance, self.total_weeks)

    def actions(self, state):
        return sorted(self._by_kind.keys())

    def best_candidate(self, kind: str) -> Action:
        cands = self._by_kind.get(kind, [Action(kind="no-op")])
        return min(cands, key=lambda c: predicted_delta(self.instance, c))

    def step(self, state, action_kind, rng):
        cand = self.best_candidate(action_kind)
        after = baseline_schedule(apply_action(self.instance, cand))
        reward = -schedule_cost(after, self.weights)
        return ("terminal",) + state, reward, True


def train(policy_config: dict, instance_generator, episodes: int, seed: int) -> Policy:
    """Train the leveling policy on generated look-ahead instances."""
    weights = tuple(policy_config.get("reward_weights", (1.0, 0.5, 10.0)))
    total_weeks = int(policy_config.get("total_weeks", 26))

    def factory(rng):
        instance = instance_generator(rng)
        return SchedulingEnv(instance, weights=weights, total_weeks=total_weeks)

    policy = q_learning(
        factory, episodes=episodes, seed=seed,
        alpha=float(policy_config.get("alpha", 0.2)),
        gamma=float(policy_config.get("gamma", 0.95)),
        eps_start=float(policy_config.get("eps_start", 0.9)),
        eps_end=float(policy_config.get("eps_end", 0.05)),
    )
    policy.reward_weights = weights
    return policy


def recommend(policy: Policy, instance: LookaheadInstance, k: int,
              week: int = None, id_prefix: str = "RL") -> list:
    """Top-k feasible moves ranked by learned value, then by simulated gain.

    Every recommendation carries the overtime delta from a one-step simulation;
    infeasible candidates (those that raise window slip) are dropped.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    env = SchedulingEnv(instance, weights=policy.reward_weights)
    state = discretize_state(instance)
    base = baseline_schedule(instance)
    scored = []
    for kind in env.actions(state):
        cand = env.best_candidate(kind)
        if cand.kind == "no-op":
            continue
        after = baseline_schedule(apply_action(instance, cand))
        if after.slip_days > base.slip_days:
            continue  # would extend the window: infeasible by contract
        delta = after.overtime_hours - base.overtime_hours
        scored.append((policy.value(state, kind), -delta, kind, cand, delta))
    scored.sort(key=lambda row: (-row[0], -row[1], row[2]))
    out = []
    for i, (_, _, kind, cand, delta) in enumerate(scored[:k], start=1):
        out.append(Recommendation(
            action_id=f"{id_prefix}-{(week or instance.week):03d}{chr(96 + i) if i > 1 else ''}",
            week=week or instance.week,
            action=cand,
            summary=cand.describe(),
            predicted_overtime_delta=delta,
        ))
    return out
