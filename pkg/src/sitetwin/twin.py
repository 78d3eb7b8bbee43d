"""Event-sourced project twin: ingestion, the weekly control loop, decision
handling, snapshots, and the 16-week replay harness.

Every mutation is an event; replaying the event log from an empty twin
reproduces the exact final state (stochastic steps record their seeds).
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

from . import fixtures as fixture_data
from .costmap import SpecLine, UNCLASSIFIED, classify, evaluate, labor_savings
from .errors import SchemaViolation, SiteTwinError
from .evm import EvmPoint, compute_metrics, mape, reconcile, s_curves
from .forecast import (BufferState, DurationBelief, ProgressEvidence,
                       apply_week_evidence, monte_carlo_forecast)
from .graph5d import CostItem, IndexTable, KnowledgeGraph
from .network import cpm_pass, network_from_dict, network_to_dict
from .resources import (Action, AlreadyDecided, EmptyWindow, LookaheadInstance,
                        MakespanDegradation, Recommendation, Resource,
                        WindowTask, apply_action, baseline_schedule)

WORKDAYS_PER_WEEK = 5
DEFAULT_CONFIG = {
    "seed": 20250106,
    "n_samples": 10_000,
    "project_buffer_days": 20.0,
    "feeding_buffer_days": 27.0,
    "overhead_day_rate": 1000.0,
    "lookahead_horizon": 1,
    "weeks_per_month": 4,
}


class UnknownKind(SiteTwinError):
    pass


class MissingEvidence(SiteTwinError):
    pass


class CorruptSnapshot(SiteTwinError):
    pass


@dataclass
class WeeklyCycleResult:
    week: int
    version: int
    updated_beliefs: int
    p50: float
    p80: float
    criticality: dict
    histogram: tuple
    buffer_percent_used: float
    evm: dict
    baseline_overtime: float
    optimized_overtime: float
    idle_hours: float
    recommendation_ids: tuple
    evidence_missing: bool
    det_makespan: float
    det_critical: tuple
    seed: int
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["criticality"] = {k: self.criticality[k] for k in sorted(self.criticality)}
        d.pop("elapsed_ms")  # wall-clock timing is reported, never fingerprinted
        return d


INGEST_KINDS = ("network", "beliefs", "evidence", "ledger", "evm", "quantities",
                "corpus", "indices", "resources", "decision_plan")


class Twin:
    """Versioned project state with an append-only event log."""

    def __init__(self, project_id: str):
        self.project_id = project_id
        self.version = 0
        self.config = dict(DEFAULT_CONFIG)
        # execution knob, never serialized: results must not depend on it
        self.workers = 1
        self.network = None
        self.prior_beliefs = {}
        self.beliefs = {}
        self.evidence = {}          # week -> list[ProgressEvidence]
        self.quantities = []
        self.evm_points = []
        self.corpus = []
        self.graph = KnowledgeGraph()
        self.ledger = []
        self.indices = IndexTable()
        self.resources = {}
        self.decision_plan = {}     # week -> recorded proposal dict
        self.recommendations = {}   # action_id -> Recommendation
        self.decision_log = []      # append-only dicts
        self.buffer = None
        self.weekly = {}            # week -> WeeklyCycleResult
        self.last_week = 0
        self.events = []

    # -- event machinery -----------------------------------------------------

    def _record(self, op: str, data: dict):
        self.events.append({"seq": len(self.events) + 1, "op": op, "data": data})
        self.version += 1

    @classmethod
    def from_events(cls, project_id: str, events) -> "Twin":
        twin = cls(project_id)
        for ev in events:
            op, data = ev["op"], ev["data"]
            if op == "configure":
                twin._apply_configure(data)
            elif op == "ingest":
                twin._apply_ingest(data["kind"], data["payload"])
            elif op == "run_week":
                twin._apply_run_week(data["week"], data["seed"], data["flags"])
            elif op == "decide":
                twin._apply_decide(data["action_id"], data["adopted"],
                                   data["reason"], data["timestamp"])
            else:
                raise SiteTwinError(f"unknown event op {op!r}")
            twin.events.append(ev)
            twin.version += 1
        return twin

    # -- configuration ---------------------------------------------------------

    def configure(self, settings: dict):
        self._apply_configure(settings)
        self._record("configure", dict(settings))
        return self

    def _apply_configure(self, settings: dict):
        self.config.update(settings)

    # -- ingestion -------------------------------------------------------------

    def ingest(self, kind: str, payload: str):
        """Validate and merge one file; malformed rows reject the whole file."""
        self._apply_ingest(kind, payload)
        self._record("ingest", {"kind": kind, "payload": payload})
        return self

    def _apply_ingest(self, kind: str, payload: str):
        if kind not in INGEST_KINDS:
            raise UnknownKind(f"unknown ingest kind {kind!r}")
        handler = getattr(self, f"_ingest_{kind}")
        handler(payload)

    def _ingest_network(self, payload: str):
        self.network = network_from_dict(json.loads(payload))
        for act in self.network.activities:
            self.graph.register(act.id, "activity")

    def _ingest_beliefs(self, payload: str):
        rows = _parse_csv(payload, ("activity_id", "mean", "sd"))
        beliefs = {}
        for i, row in rows:
            try:
                belief = DurationBelief(
                    activity_id=row["activity_id"],
                    mean=_number(row, "mean", i), sd=_number(row, "sd", i),
                    family=row.get("family") or "normal-truncated-at-zero")
            except ValueError as exc:
                raise SchemaViolation(str(exc), row=i) from exc
            if self.network is not None and not self.network.has(belief.activity_id):
                raise SchemaViolation(f"unknown activity {belief.activity_id!r}",
                                      row=i, column="activity_id")
            beliefs[belief.activity_id] = belief
        self.prior_beliefs = beliefs
        self.beliefs = dict(beliefs)

    def _ingest_evidence(self, payload: str):
        rows = _parse_csv(payload, ("week", "activity_id", "percent_complete",
                                    "elapsed_days", "observation_sd"))
        staged = {}
        for i, row in rows:
            try:
                ev = ProgressEvidence(
                    activity_id=row["activity_id"],
                    week=int(row["week"]),
                    percent_complete=_number(row, "percent_complete", i),
                    elapsed=_number(row, "elapsed_days", i),
                    observation_sd=_number(row, "observation_sd", i))
            except ValueError as exc:
                raise SchemaViolation(str(exc), row=i,
                                      column="percent_complete") from exc
            if self.network is not None and not self.network.has(ev.activity_id):
                raise SchemaViolation(f"unknown activity {ev.activity_id!r}",
                                      row=i, column="activity_id")
            staged.setdefault(ev.week, []).append(ev)
        for week, items in staged.items():
            self.evidence.setdefault(week, []).extend(items)

    def _ingest_ledger(self, payload: str):
        rows = _parse_csv(payload, ("id", "csi", "description", "unit_cost",
                                    "quantity", "kind"))
        items = []
        for i, row in rows:
            try:
                items.append(CostItem(
                    id=row["id"], csi_division=row["csi"],
                    description=row["description"],
                    unit_cost=_number(row, "unit_cost", i),
                    quantity=_number(row, "quantity", i),
                    kind=row["kind"], source="ledger"))
            except ValueError as exc:
                raise SchemaViolation(str(exc), row=i) from exc
        for item in items:
            self.ledger.append(item)
            self.graph.register(item.id, "cost-item", item)
            target = "A" + item.id.split("-A", 1)[1][:3] if "-A" in item.id else None
            if target and self.network is not None and self.network.has(target):
                self.graph.link(item.id, target, "maps-to")

    def _ingest_evm(self, payload: str):
        rows = _parse_csv(payload, ("period", "pv", "ev", "ac"))
        points = []
        for i, row in rows:
            try:
                points.append(EvmPoint(period=int(row["period"]),
                                       pv=_number(row, "pv", i),
                                       ev=_number(row, "ev", i),
                                       ac=_number(row, "ac", i)))
            except ValueError as exc:
                raise SchemaViolation(str(exc), row=i) from exc
        self.evm_points = sorted(points, key=lambda p: p.period)

    def _ingest_quantities(self, payload: str):
        rows = _parse_csv(payload, ("work_package", "planned", "measured"))
        staged = []
        for i, row in rows:
            planned = _number(row, "planned", i)
            measured = _number(row, "measured", i)
            if planned <= 0:
                raise SchemaViolation("planned must be > 0", row=i, column="planned")
            staged.append(reconcile(planned, measured, row["work_package"]))
        self.quantities.extend(staged)
        for q in staged:
            node = f"WP:{q.work_package}"
            self.graph.register(node, "work-package", q)

    def _ingest_corpus(self, payload: str):
        rows = _parse_csv(payload, ("text", "true_division"))
        staged = []
        for i, row in rows:
            if not row["text"].strip():
                raise SchemaViolation("empty text", row=i, column="text")
            staged.append(SpecLine(text=row["text"], true_division=row["true_division"]))
        self.corpus.extend(staged)

    def _ingest_indices(self, payload: str):
        data = json.loads(payload)
        self.indices = IndexTable(
            cci_multiplier=float(data["cci_multiplier"]),
            wage_multiplier=float(data["wage_multiplier"]),
            vintage=int(data.get("vintage", 2025)))

    def _ingest_resources(self, payload: str):
        data = json.loads(payload)
        for r in data["resources"]:
            res = Resource(id=r["id"], capacity=float(r["capacity"]),
                           overtime_cap=float(r.get("overtime_cap", 0.0)),
                           hourly_cost=float(r.get("hourly_cost", 0.0)))
            self.resources[res.id] = res

    def _ingest_decision_plan(self, payload: str):
        data = json.loads(payload)
        for entry in data["decisions"]:
            self.decision_plan[int(entry["week"])] = entry

    # -- weekly control loop -----------------------------------------------------

    def run_week(self, week: int, config: dict = None) -> WeeklyCycleResult:
        if self.network is None or not self.beliefs:
            raise SiteTwinError("ingest a network and beliefs before running weeks")
        if week in self.weekly:
            return self.weekly[week]  # idempotent re-run at this version
        if week != self.last_week + 1:
            raise SiteTwinError(f"weeks run in order; expected {self.last_week + 1}")
        if config:
            self._apply_configure(config)
            self._record("configure", dict(config))
        seed = int(self.config["seed"])
        result = self._apply_run_week(week, seed, {})
        self._record("run_week", {"week": week, "seed": seed, "flags": {}})
        return result

    def _apply_run_week(self, week: int, seed: int, flags: dict) -> WeeklyCycleResult:
        t0 = time.perf_counter()
        week_rows = self.evidence.get(week, [])
        missing = not week_rows
        self.beliefs, updated = apply_week_evidence(self.beliefs, week_rows, week)

        fc = monte_carlo_forecast(self.network, self.beliefs,
                                  int(self.config["n_samples"]), seed,
                                  workers=self.workers)
        det = cpm_pass(self.network, {a: b.mean for a, b in self.beliefs.items()})
        feeding_finish = max((det.early_finish[a] for a in self.network.ids()
                              if a not in det.critical_set), default=det.makespan)
        if self.buffer is None:
            self.buffer = BufferState(
                project_buffer_size=float(self.config["project_buffer_days"]),
                feeding_buffer_size=float(self.config["feeding_buffer_days"]))
        from .forecast import buffer_update
        self.buffer = buffer_update(self.buffer, fc.p50_finish, feeding_finish)

        evm_view = self._evm_view(week)
        base_sched, opt_sched, rec_ids = self._lookahead_cycle(week)

        result = WeeklyCycleResult(
            week=week, version=self.version + 1, updated_beliefs=updated,
            p50=fc.p50_finish, p80=fc.p80_finish,
            criticality=fc.criticality, histogram=fc.finish_histogram,
            buffer_percent_used=self.buffer.percent_used,
            evm=evm_view,
            baseline_overtime=base_sched.overtime_hours if base_sched else 0.0,
            optimized_overtime=opt_sched.overtime_hours if opt_sched else 0.0,
            idle_hours=base_sched.idle_hours if base_sched else 0.0,
            recommendation_ids=tuple(rec_ids),
            evidence_missing=missing,
            det_makespan=det.makespan,
            det_critical=tuple(sorted(det.critical_set)),
            seed=seed,
            elapsed_ms=(time.perf_counter() - t0) * 1000.0,
        )
        self.weekly[week] = result
        self.last_week = max(self.last_week, week)
        return result

    def _evm_view(self, week: int) -> dict:
        if not self.evm_points:
            return {}
        month = min(max(1, math.ceil(week / self.config["weeks_per_month"])),
                    max(p.period for p in self.evm_points))
        curves = s_curves([p for p in self.evm_points if p.period <= month])
        cum = EvmPoint(period=month, pv=curves["pv"][-1], ev=curves["ev"][-1],
                       ac=curves["ac"][-1])
        m = compute_metrics(cum)
        return {"month": month, "spi": m.spi, "cpi": m.cpi,
                "sv_pct": m.sv_pct, "cv_pct": m.cv_pct,
                "crossover": curves["crossover"]}

    def build_lookahead(self, week: int, horizon: int = None) -> LookaheadInstance:
        """Extract the activities active in [week, week+horizon) with remaining
        in-window work, from the deterministic schedule on current beliefs."""
        horizon = horizon or int(self.config["lookahead_horizon"])
        if week < 1:
            raise ValueError("week must be >= 1")
        det = cpm_pass(self.network, {a: b.mean for a, b in self.beliefs.items()})
        w0 = (week - 1) * WORKDAYS_PER_WEEK
        w1 = w0 + horizon * WORKDAYS_PER_WEEK
        tasks = []
        for act in self.network.activities:
            es, ef = det.early_start[act.id], det.early_finish[act.id]
            overlap = min(ef, w1) - max(es, w0)
            if overlap <= 1e-9 or not act.resource_demands:
                continue
            tasks.append(WindowTask(
                activity_id=act.id,
                duration=max(1, int(round(overlap))),
                demands=tuple(act.resource_demands),
                preds=tuple(p for p in self.network.predecessors(act.id)
                            if max(det.early_finish[p], w0) > w0
                            and det.early_start[p] < w1),
                slack=det.total_float[act.id]))
        if not tasks:
            raise EmptyWindow(f"no active work in week {week}")
        ids = {t.activity_id for t in tasks}
        tasks = [replace(t, preds=tuple(p for p in t.preds if p in ids))
                 for t in tasks]
        return LookaheadInstance(week=week, horizon=horizon,
                                 days=horizon * WORKDAYS_PER_WEEK,
                                 tasks=tuple(tasks), resources=dict(self.resources))

    def _lookahead_cycle(self, week: int):
        if not self.resources:
            return None, None, ()
        try:
            instance = self.build_lookahead(week)
        except EmptyWindow:
            return None, None, ()
        base = baseline_schedule(instance)
        rec_ids = []
        plan = self.decision_plan.get(week)
        if plan:
            action = Action(**plan["action"])
            after = baseline_schedule(apply_action(instance, action))
            rec = Recommendation(
                action_id=plan["action_id"], week=week, action=action,
                summary=plan.get("summary", action.describe()),
                predicted_overtime_delta=after.overtime_hours - base.overtime_hours)
            self.recommendations[rec.action_id] = rec
            rec_ids.append(rec.action_id)
        return base, base, rec_ids

    # -- decisions ---------------------------------------------------------------

    def decide(self, action_id: str, adopted: bool, reason: str = "",
               timestamp: str = None):
        timestamp = timestamp or dt.datetime(2025, 1, 1).isoformat()
        entry = self._apply_decide(action_id, adopted, reason, timestamp)
        self._record("decide", {"action_id": action_id, "adopted": adopted,
                                "reason": reason, "timestamp": timestamp})
        return entry

    def _apply_decide(self, action_id: str, adopted: bool, reason: str,
                      timestamp: str) -> dict:
        rec = self.recommendations.get(action_id)
        if rec is None:
            raise SiteTwinError(f"unknown recommendation {action_id!r}")
        if rec.decided():
            raise AlreadyDecided(f"{action_id} already {rec.status}")
        week_result = self.weekly.get(rec.week)
        if adopted:
            instance = self.build_lookahead(rec.week)
            before = baseline_schedule(instance)
            after = baseline_schedule(apply_action(instance, rec.action))
            if after.slip_days > before.slip_days:
                raise MakespanDegradation(
                    f"{action_id} would extend the week-{rec.week} window")
            rec.status = "adopted"
            if week_result:
                week_result.optimized_overtime = after.overtime_hours
        else:
            rec.status = "rejected"
            rec.reason = reason
        entry = {"week": rec.week, "action_id": action_id, "summary": rec.summary,
                 "status": rec.status, "reason": reason, "timestamp": timestamp}
        self.decision_log.append(entry)
        return entry

    # -- reports -------------------------------------------------------------------

    def overtime_report(self, weeks: int) -> dict:
        if weeks < 1:
            raise ValueError("weeks must be >= 1")
        baseline, optimized, detail = [], [], []
        for w in range(1, weeks + 1):
            res = self.weekly.get(w)
            b = res.baseline_overtime if res else 0.0
            o = res.optimized_overtime if res else 0.0
            baseline.append(b)
            optimized.append(o)
            detail.append({"week": w, "baseline": b, "optimized": o})
        total_base = sum(baseline)
        total_opt = sum(optimized)
        proposed = [r for r in self.recommendations.values() if r.week <= weeks]
        adopted = [r for r in proposed if r.status == "adopted"]
        rate = (len(adopted) / len(proposed) * 100.0) if proposed else None
        det = cpm_pass(self.network, {a: b.mean for a, b in self.beliefs.items()}) \
            if self.network and self.beliefs else None
        return {
            "weeks": detail,
            "cumulative_baseline_hours": total_base,
            "cumulative_optimized_hours": total_opt,
            "reduction_hours": total_base - total_opt,
            "reduction_pct": ((total_base - total_opt) / total_base * 100.0)
                             if total_base > 0 else 0.0,
            "adoption_rate_pct": rate,
            "proposed": len(proposed),
            "adopted": len(adopted),
            "final_makespan": det.makespan if det else None,
        }

    def classification_report(self) -> dict:
        if not self.corpus:
            return {}
        ruleset = fixture_data.load_ruleset()
        preds = [classify(line, ruleset) for line in self.corpus]
        labels = [line.true_division for line in self.corpus]
        metrics = evaluate(preds, labels)
        return {
            "weighted_f1": metrics.weighted_f1,
            "weighted_precision": metrics.weighted_precision,
            "weighted_recall": metrics.weighted_recall,
            "micro_accuracy": metrics.micro_accuracy,
            "per_division": {d: asdict(s) for d, s in metrics.per_division.items()},
        }

    def cost_mape(self, use_classifier: bool = True) -> float:
        """Division-level MAPE of classified ledger totals vs true totals."""
        if not self.ledger:
            return 0.0
        ruleset = fixture_data.load_ruleset()
        divisions = sorted({i.csi_division for i in self.ledger}
                           & set(ruleset.keys()))
        truth = {d: 0.0 for d in divisions}
        estimate = {d: 0.0 for d in divisions}
        for item in self.ledger:
            division = (classify(SpecLine(text=item.description), ruleset)
                        if use_classifier else UNCLASSIFIED)
            if item.csi_division in truth:
                truth[item.csi_division] += item.direct_cost
            if division in estimate:
                estimate[division] += item.direct_cost
        pairs = [(estimate[d], truth[d]) for d in divisions if truth[d] > 0]
        return mape([e for e, t in pairs], [t for e, t in pairs])

    # -- persistence ------------------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "version": self.version,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "network": network_to_dict(self.network) if self.network else None,
            "prior_beliefs": _beliefs_to_list(self.prior_beliefs),
            "beliefs": _beliefs_to_list(self.beliefs),
            "evidence": {str(w): [_evidence_to_dict(e) for e in rows]
                         for w, rows in sorted(self.evidence.items())},
            "quantities": [asdict(q) for q in self.quantities],
            "evm_points": [asdict(p) for p in self.evm_points],
            "corpus": [{"text": l.text, "true_division": l.true_division}
                       for l in self.corpus],
            "ledger": [asdict(i) for i in self.ledger],
            "graph": self.graph.to_dict(),
            "indices": asdict(self.indices),
            "resources": [asdict(self.resources[r]) for r in sorted(self.resources)],
            "decision_plan": {str(w): self.decision_plan[w]
                              for w in sorted(self.decision_plan)},
            "recommendations": [_rec_to_dict(self.recommendations[k])
                                for k in sorted(self.recommendations)],
            "decision_log": list(self.decision_log),
            "buffer": _buffer_to_dict(self.buffer),
            "weekly": {str(w): self.weekly[w].to_dict() for w in sorted(self.weekly)},
            "last_week": self.last_week,
            "events": self.events,
        }

    def snapshot(self) -> str:
        state = self.state_dict()
        body = json.dumps(state, sort_keys=True, separators=(",", ":"))
        checksum = hashlib.sha256(body.encode("utf-8")).hexdigest()
        return json.dumps({"checksum": checksum, "state": state},
                          sort_keys=True, indent=1)

    @classmethod
    def restore(cls, snapshot_text: str) -> "Twin":
        try:
            payload = json.loads(snapshot_text)
            checksum = payload["checksum"]
            state = payload["state"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CorruptSnapshot("snapshot is not parseable") from exc
        body = json.dumps(state, sort_keys=True, separators=(",", ":"))
        if hashlib.sha256(body.encode("utf-8")).hexdigest() != checksum:
            raise CorruptSnapshot("checksum mismatch")
        twin = cls.from_events(state["project_id"], state["events"])
        return twin

    def fingerprint(self) -> str:
        body = json.dumps(self.state_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _beliefs_to_list(beliefs: dict) -> list:
    return [
        {"activity_id": b.activity_id, "mean": b.mean, "sd": b.sd,
         "family": b.family, "provenance": b.provenance}
        for _, b in sorted(beliefs.items())
    ]


def _evidence_to_dict(e: ProgressEvidence) -> dict:
    return {"activity_id": e.activity_id, "week": e.week,
            "percent_complete": e.percent_complete, "elapsed": e.elapsed,
            "observation_sd": e.observation_sd}


def _rec_to_dict(r: Recommendation) -> dict:
    return {"action_id": r.action_id, "week": r.week, "action": asdict(r.action),
            "summary": r.summary,
            "predicted_overtime_delta": r.predicted_overtime_delta,
            "status": r.status, "reason": r.reason}


def _buffer_to_dict(b: BufferState) -> dict:
    if b is None:
        return None
    return {"project_buffer_size": b.project_buffer_size,
            "feeding_buffer_size": b.feeding_buffer_size,
            "project_deltas": list(b.project_deltas),
            "feeding_deltas": list(b.feeding_deltas),
            "cumulative_project": b.cumulative_project,
            "cumulative_feeding": b.cumulative_feeding,
            "percent_used": b.percent_used,
            "last_project_finish": b.last_project_finish,
            "last_feeding_finish": b.last_feeding_finish}


def _parse_csv(payload: str, required: tuple):
    reader = csv.DictReader(io.StringIO(payload))
    if reader.fieldnames is None:
        raise SchemaViolation("empty file: missing header row")
    missing = [c for c in required if c not in reader.fieldnames]
    if missing:
        raise SchemaViolation(f"missing columns {missing}")
    rows = []
    for i, row in enumerate(reader, start=2):  # header is line 1
        rows.append((i, row))
    return rows


def _number(row: dict, column: str, line: int) -> float:
    raw = row.get(column, "")
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise SchemaViolation(f"not a number: {raw!r}", row=line, column=column)


# ---------------------------------------------------------------------------
# Demo project assembly and the replay harness

def build_demo_twin(config: dict = None, ablate=frozenset()) -> Twin:
    """Assemble the packaged fixture project, optionally nulling components."""
    twin = Twin("dfw-midrise")
    if config:
        config = dict(config)
        twin.workers = int(config.pop("workers", 1))
        if config:
            twin.configure(config)
    twin.ingest("network", fixture_data.read_text("network.json"))
    twin.ingest("beliefs", fixture_data.read_text("beliefs.csv"))
    evidence_text = fixture_data.read_text("evidence.csv")
    if "cv" in ablate:
        evidence_text = _planned_evidence(twin)
    if "bayes" not in ablate:
        twin.ingest("evidence", evidence_text)
    twin.ingest("ledger", fixture_data.read_text("ledger.csv"))
    twin.ingest("evm", fixture_data.read_text("evm.csv"))
    twin.ingest("quantities", fixture_data.read_text("quantities.csv"))
    twin.ingest("corpus", fixture_data.read_text("corpus.csv"))
    twin.ingest("indices", fixture_data.read_text("indices.json"))
    twin.ingest("resources", fixture_data.read_text("resources.json"))
    if "drl" not in ablate:
        twin.ingest("decision_plan", fixture_data.read_text("decision_plan.json"))
    return twin


def _planned_evidence(twin: Twin) -> str:
    """cv-null evidence: every started activity reports exactly on plan."""
    det = cpm_pass(twin.network, {a: b.mean for a, b in twin.prior_beliefs.items()})
    out = ["week,activity_id,percent_complete,elapsed_days,observation_sd"]
    for week in range(1, 17):
        day = week * WORKDAYS_PER_WEEK
        for aid in twin.network.ids():
            es, ef = det.early_start[aid], det.early_finish[aid]
            dur = ef - es
            if es >= day or dur <= 0:
                continue
            if ef <= day:
                if ef > day - WORKDAYS_PER_WEEK:
                    out.append(f"{week},{aid},1.0,{dur},0.1")
                continue
            elapsed = day - es
            pct = round(elapsed / dur, 6)
            sd = max(twin.prior_beliefs[aid].sd * (1 - pct), 0.05)
            out.append(f"{week},{aid},{pct},{elapsed},{round(sd, 4)}")
    return "\n".join(out) + "\n"


@dataclass
class ReplaySummary:
    complete: bool
    weekly_p50: list
    weekly_p80: list
    abs_error_by_week: list
    schedule_mape_pct: float
    cost_mape_pct: float
    labor_reduction_pct: float
    final_spi: float
    final_cpi: float
    cumulative_overtime_hours: float
    overtime_reduction_pct: float
    makespan_extended: bool
    criticality_rank_change_week: int
    deterministic_cp_change_week: int
    buffer_percent_used: float
    components_removed: tuple
    fingerprint: str
    twin: Twin = field(repr=False, default=None)

    def metric_row(self) -> dict:
        return {
            "components_removed": sorted(self.components_removed),
            "schedule_mape_pct": self.schedule_mape_pct,
            "cost_mape_pct": self.cost_mape_pct,
            "final_spi": self.final_spi,
            "final_cpi": self.final_cpi,
            "cumulative_overtime_hours": self.cumulative_overtime_hours,
            "overtime_reduction_pct": self.overtime_reduction_pct,
            "weekly_p50": self.weekly_p50,
            "fingerprint": self.fingerprint,
        }


def drive_weeks(twin: Twin, weeks: int = 16):
    """Run the control loop for weeks 1..N, deciding per the recorded plan."""
    for week in range(1, weeks + 1):
        if week in twin.weekly:
            continue
        result = twin.run_week(week)
        plan = twin.decision_plan.get(week)
        if plan and result.recommendation_ids:
            twin.decide(plan["action_id"], bool(plan["adopted"]),
                        plan.get("reason", ""),
                        timestamp=f"2025-W{week:02d}")
    return twin


def summarize_twin(twin: Twin, weeks: int = 16, ablate=frozenset(),
                   actual_finish: float = 128.0) -> ReplaySummary:
    """Build the replay scorecard from the twin's cached weekly results."""
    ablate = frozenset(ablate)
    if any(w not in twin.weekly for w in range(1, weeks + 1)):
        missing = [w for w in range(1, weeks + 1) if w not in twin.weekly]
        from .stats import IncompleteReplay
        raise IncompleteReplay(f"weeks not run: {missing}")
    rank_change_week = None
    cp_change_week = None
    prev_top2 = None
    prev_cp = None
    for week in range(1, weeks + 1):
        result = twin.weekly[week]
        top2 = tuple(sorted(result.criticality,
                            key=lambda a: (-result.criticality[a], a))[:2])
        if prev_top2 is not None and top2 != prev_top2 and rank_change_week is None:
            rank_change_week = week
        prev_top2 = top2
        det_critical = tuple(result.det_critical)
        if prev_cp is not None and det_critical != prev_cp and cp_change_week is None:
            cp_change_week = week
        prev_cp = det_critical
    p50s = [twin.weekly[w].p50 for w in range(1, weeks + 1)]
    p80s = [twin.weekly[w].p80 for w in range(1, weeks + 1)]
    errors = [abs(p - actual_finish) for p in p50s]
    ot = twin.overtime_report(weeks)
    labor = labor_savings(fixture_data.load_labor_phases())
    evm_final = twin.weekly[weeks].evm
    base_makespan = cpm_pass(twin.network,
                             {a.id: a.base_duration
                              for a in twin.network.activities}).makespan
    return ReplaySummary(
        complete=True,
        weekly_p50=p50s,
        weekly_p80=p80s,
        abs_error_by_week=errors,
        schedule_mape_pct=mape(p50s, [actual_finish] * weeks),
        cost_mape_pct=twin.cost_mape(use_classifier="nlp" not in ablate),
        labor_reduction_pct=labor["average_pct"] if "nlp" not in ablate else 0.0,
        final_spi=evm_final.get("spi", 0.0),
        final_cpi=evm_final.get("cpi", 0.0),
        cumulative_overtime_hours=ot["cumulative_optimized_hours"],
        overtime_reduction_pct=ot["reduction_pct"],
        makespan_extended=(ot["final_makespan"] or 0) > base_makespan + 1e-9,
        criticality_rank_change_week=rank_change_week,
        deterministic_cp_change_week=cp_change_week,
        buffer_percent_used=twin.buffer.percent_used if twin.buffer else 0.0,
        components_removed=tuple(sorted(ablate)),
        fingerprint=twin.fingerprint(),
        twin=twin,
    )


def replay_project(config: dict = None, ablate=frozenset(), weeks: int = 16,
                   actual_finish: float = 128.0) -> ReplaySummary:
    """Run the full weekly loop on the fixture project and summarize."""
    ablate = frozenset(ablate)
    twin = drive_weeks(build_demo_twin(config, ablate), weeks)
    return summarize_twin(twin, weeks, ablate, actual_finish)
