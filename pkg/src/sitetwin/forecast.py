"""Duration beliefs, weekly Bayesian updating, Monte Carlo finish forecasting,
criticality indices, and critical-chain buffer accounting.

The Monte Carlo kernel is vectorized but contractually equivalent to running
one deterministic CPM pass per replication. All randomness flows from a single
counter-based (Philox) stream keyed by the caller's seed, with replication r
owning row r of the draw matrix, so results are a pure function of
(network, beliefs, n, seed) no matter how the work is partitioned.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import SiteTwinError
from .network import FLOAT_TOL, ActivityNetwork

NORMAL = "normal-truncated-at-zero"
TRIANGULAR = "triangular"


class ZeroProgress(SiteTwinError):
    """No update is possible from a 0%-complete observation; caller skips."""


class EmptyNetwork(SiteTwinError):
    pass


@dataclass(frozen=True)
class DurationBelief:
    activity_id: str
    mean: float
    sd: float
    family: str = NORMAL
    provenance: str = "prior"

    def __post_init__(self):
        if self.sd < 0:
            raise ValueError(f"{self.activity_id}: sd must be >= 0")
        if self.family not in (NORMAL, TRIANGULAR):
            raise ValueError(f"unknown distribution family {self.family!r}")


@dataclass(frozen=True)
class ProgressEvidence:
    activity_id: str
    week: int
    percent_complete: float
    elapsed: float
    observation_sd: float

    def __post_init__(self):
        if not 0.0 <= self.percent_complete <= 1.0:
            raise ValueError("percent_complete must lie in [0, 1]")
        if self.elapsed < 0:
            raise ValueError("elapsed must be >= 0")


@dataclass(frozen=True)
class ForecastResult:
    p50_finish: float
    p80_finish: float
    samples: int
    criticality: dict  # id -> percent in [0, 100]
    finish_histogram: tuple  # ((percent, finish), ...) quantile table


@dataclass(frozen=True)
class BufferState:
    project_buffer_size: float
    feeding_buffer_size: float
    project_deltas: tuple = ()
    feeding_deltas: tuple = ()
    last_project_finish: float = None
    last_feeding_finish: float = None

    @property
    def cumulative_project(self) -> float:
        return float(sum(self.project_deltas))

    @property
    def cumulative_feeding(self) -> float:
        return float(sum(self.feeding_deltas))

    @property
    def percent_used(self) -> float:
        return self.cumulative_project / self.project_buffer_size * 100.0


def implied_duration(evidence: ProgressEvidence) -> float:
    """Projected total duration at the observed production rate."""
    if evidence.percent_complete == 0.0:
        raise ZeroProgress(f"{evidence.activity_id}: 0% complete, no rate signal")
    return evidence.elapsed / evidence.percent_complete


def bayesian_update(prior: DurationBelief, observed: float,
                    observation_sd: float) -> DurationBelief:
    """Precision-weighted conjugate normal update of a duration belief."""
    if prior.sd <= 0:
        raise ValueError("prior.sd must be > 0 for an update")
    if observation_sd <= 0:
        raise ValueError("observation_sd must be > 0")
    if prior.family != NORMAL:
        raise ValueError("conjugate update requires the normal family")
    prior_prec = 1.0 / prior.sd**2
    obs_prec = 1.0 / observation_sd**2
    post_prec = prior_prec + obs_prec
    post_mean = (prior.mean * prior_prec + observed * obs_prec) / post_prec
    post_sd = post_prec**-0.5
    return replace(prior, mean=post_mean, sd=post_sd)


def pin_belief(prior: DurationBelief, actual: float, week: int = None) -> DurationBelief:
    """Completed activity: duration is known exactly."""
    prov = f"posterior(week {week})" if week is not None else "posterior"
    return replace(prior, mean=float(actual), sd=0.0, provenance=prov)


# ---------------------------------------------------------------------------
# Sampling. Inverse-CDF draws from a shared uniform matrix keep common-random-
# number pairing intact across scenario runs and make every sample monotone in
# the belief mean (a shifted mean can only shift the sample the same way).

def uniform_matrix(seed: int, n: int, k: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=seed))
    return gen.random((n, k))


def sample_duration(belief: DurationBelief, u: np.ndarray) -> np.ndarray:
    """Map uniforms through the belief's inverse CDF, truncated at zero."""
    if belief.sd == 0.0:
        return np.full_like(u, belief.mean)
    if belief.family == NORMAL:
        lo = ndtr(-belief.mean / belief.sd)  # mass below zero
        return belief.mean + belief.sd * ndtri(lo + u * (1.0 - lo))
    return _triangular_inverse(belief.mean, belief.sd, u)


def _triangular_inverse(mean: float, sd: float, u: np.ndarray) -> np.ndarray:
    half = np.sqrt(6.0) * sd  # sd of a symmetric triangular is half-width/sqrt(6)
    a, c, b = mean - half, mean, mean + half
    lo = _triangular_cdf(a, c, b, 0.0)
    uu = lo + u * (1.0 - lo)
    left = uu <= (c - a) / (b - a)
    out = np.empty_like(uu)
    out[left] = a + np.sqrt(uu[left] * (b - a) * (c - a))
    out[~left] = b - np.sqrt((1.0 - uu[~left]) * (b - a) * (b - c))
    return out


def _triangular_cdf(a: float, c: float, b: float, x: float) -> float:
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    if x <= c:
        return (x - a) ** 2 / ((b - a) * (c - a))
    return 1.0 - (b - x) ** 2 / ((b - a) * (b - c))


# ---------------------------------------------------------------------------
# Monte Carlo forecast

def _vectorized_cpm(network: ActivityNetwork, durations: np.ndarray,
                    index: dict) -> tuple:
    """Forward+backward pass over an (n, k) duration matrix.

    Returns (makespan vector, criticality counts per activity).
    """
    n = durations.shape[0]
    order = network.topological_order()
    preds = {aid: network.predecessors(aid) for aid in order}
    succs = {aid: network.successors(aid) for aid in order}
    sinks = set(network.sinks())

    es = np.zeros_like(durations)
    ef = np.zeros_like(durations)
    for aid in order:
        j = index[aid]
        if preds[aid]:
            stack = np.stack([ef[:, index[p]] for p in preds[aid]], axis=0)
            es[:, j] = stack.max(axis=0)
        ef[:, j] = es[:, j] + durations[:, j]

    makespan = np.max(np.stack([ef[:, index[s]] for s in sinks], axis=0), axis=0) \
        if sinks else np.zeros(n)

    ls = np.zeros_like(durations)
    lf = np.zeros_like(durations)
    for aid in reversed(order):
        j = index[aid]
        if succs[aid]:
            stack = np.stack([ls[:, index[s]] for s in succs[aid]], axis=0)
            lf[:, j] = stack.min(axis=0)
        else:
            lf[:, j] = makespan
        ls[:, j] = lf[:, j] - durations[:, j]

    critical_counts = ((ls - es) <= FLOAT_TOL).sum(axis=0)
    return makespan, critical_counts


def nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank empirical quantile on a pre-sorted vector."""
    n = len(sorted_values)
    idx = max(int(np.ceil(q * n)) - 1, 0)
    return float(sorted_values[idx])


def monte_carlo_forecast(network: ActivityNetwork, beliefs: dict, n_samples: int,
                         seed: int, histogram_points=None,
                         workers: int = 1) -> ForecastResult:
    """Sample durations, propagate through the CPM network, summarize.

    ``beliefs`` must cover every activity; finished activities carry sd 0.
    The draw matrix is fixed by (seed, n_samples) before any fan-out, and the
    per-replication CPM rows are independent, so the result is bit-identical
    for any ``workers`` count.
    """
    ids = sorted(network.ids())
    if not ids:
        raise EmptyNetwork("cannot forecast an empty network")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    missing = [aid for aid in ids if aid not in beliefs]
    if missing:
        raise KeyError(f"beliefs missing for {missing}")

    index = {aid: j for j, aid in enumerate(ids)}
    u = uniform_matrix(seed, n_samples, len(ids))
    durations = np.empty_like(u)
    for aid in ids:
        durations[:, index[aid]] = sample_duration(beliefs[aid], u[:, index[aid]])

    if workers > 1 and n_samples >= workers:
        from concurrent.futures import ThreadPoolExecutor
        bounds = np.linspace(0, n_samples, workers + 1, dtype=int)
        chunks = [durations[bounds[i]:bounds[i + 1]] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda c: _vectorized_cpm(network, c, index), chunks))
        makespan = np.concatenate([p[0] for p in parts])
        crit_counts = sum(p[1] for p in parts)
    else:
        makespan, crit_counts = _vectorized_cpm(network, durations, index)
    order = np.sort(makespan)
    points = histogram_points or (5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95)
    histogram = tuple((p, nearest_rank(order, p / 100.0)) for p in points)
    criticality = {aid: 100.0 * crit_counts[index[aid]] / n_samples for aid in ids}
    return ForecastResult(
        p50_finish=nearest_rank(order, 0.50),
        p80_finish=nearest_rank(order, 0.80),
        samples=n_samples,
        criticality=criticality,
        finish_histogram=histogram,
    )


def makespan_samples(network: ActivityNetwork, beliefs: dict, n_samples: int,
                     seed: int) -> np.ndarray:
    """Raw makespan vector under the same draw contract as the forecast."""
    ids = sorted(network.ids())
    index = {aid: j for j, aid in enumerate(ids)}
    u = uniform_matrix(seed, n_samples, len(ids))
    durations = np.empty_like(u)
    for aid in ids:
        durations[:, index[aid]] = sample_duration(beliefs[aid], u[:, index[aid]])
    makespan, _ = _vectorized_cpm(network, durations, index)
    return makespan


def apply_week_evidence(beliefs: dict, week_evidence, week: int = None) -> dict:
    """One control-loop step: fold a week of progress evidence into beliefs.

    Completed activities pin to their actual duration; zero-progress rows are
    skipped (nothing to learn from them).
    """
    updated = dict(beliefs)
    count = 0
    for ev in week_evidence:
        prior = updated.get(ev.activity_id)
        if prior is None:
            raise KeyError(f"evidence for unknown activity {ev.activity_id!r}")
        if ev.percent_complete == 0.0:
            continue
        if prior.sd == 0.0:
            continue  # already pinned
        if ev.percent_complete >= 1.0:
            updated[ev.activity_id] = pin_belief(prior, ev.elapsed, week or ev.week)
        else:
            observed = implied_duration(ev)
            post = bayesian_update(prior, observed, ev.observation_sd)
            updated[ev.activity_id] = replace(
                post, provenance=f"posterior(week {week or ev.week})")
        count += 1
    return updated, count


def weekly_forecast_series(network: ActivityNetwork, prior_beliefs: dict,
                           evidence_log, n: int, seed: int):
    """Replay the weekly control loop: update beliefs, then forecast.

    Returns a list of (week, p50, p80). Weeks are taken from the evidence log;
    an empty log yields a single prior forecast at week 0.
    """
    weeks = sorted({ev.week for ev in evidence_log})
    if not weeks:
        fc = monte_carlo_forecast(network, prior_beliefs, n, seed)
        return [(0, fc.p50_finish, fc.p80_finish)]
    beliefs = dict(prior_beliefs)
    series = []
    for week in weeks:
        week_rows = [ev for ev in evidence_log if ev.week == week]
        beliefs, _ = apply_week_evidence(beliefs, week_rows, week)
        fc = monte_carlo_forecast(network, beliefs, n, seed)
        series.append((week, fc.p50_finish, fc.p80_finish))
    return series


def buffer_update(state: BufferState, project_finish: float,
                  feeding_finish: float = None) -> BufferState:
    """Consume buffer by the week-over-week slip in forecast finishes.

    Deltas are max(0, increase) so consumption never reverses; the first
    observation establishes the reference and consumes nothing.
    """
    if state.project_buffer_size <= 0 or state.feeding_buffer_size <= 0:
        raise ValueError("buffer sizes must be > 0")
    if state.last_project_finish is None:
        p_delta = 0.0
    else:
        p_delta = max(0.0, project_finish - state.last_project_finish)
    if feeding_finish is None or state.last_feeding_finish is None:
        f_delta = 0.0
    else:
        f_delta = max(0.0, feeding_finish - state.last_feeding_finish)
    return replace(
        state,
        project_deltas=state.project_deltas + (p_delta,),
        feeding_deltas=state.feeding_deltas + (f_delta,),
        last_project_finish=project_finish,
        last_feeding_finish=feeding_finish
        if feeding_finish is not None else state.last_feeding_finish,
    )
