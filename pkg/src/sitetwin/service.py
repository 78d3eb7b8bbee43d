"""HTTP facade over a project twin: read endpoints for the dashboard, write
endpoints for ingestion, the weekly cycle, decisions, and scenario runs.

Concurrency: one writer lock per project; writes may carry expected_version
for optimistic concurrency and are rejected with 409 when stale.
"""

from __future__ import annotations

import json
import os
import threading

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from .errors import SiteTwinError, SchemaViolation
from .forecast import monte_carlo_forecast
from .resources import AlreadyDecided, MakespanDegradation
from .sandbox import SandboxView, Scenario, evaluate as evaluate_scenario, tornado
from .stats import IncompleteReplay, hypothesis_report, run_ablation
from .twin import Twin, UnknownKind, build_demo_twin, summarize_twin


class ProjectStore:
    """Event-log persistence for one project directory."""

    def __init__(self, root: str):
        self.root = root
        self.events_path = os.path.join(root, "events.jsonl")
        self.meta_path = os.path.join(root, "meta.json")
        self.lock = threading.Lock()
        self._twin = None
        self._scenario_results = {}

    def exists(self) -> bool:
        return os.path.exists(self.events_path)

    def init_demo(self, config: dict = None) -> Twin:
        os.makedirs(self.root, exist_ok=True)
        twin = build_demo_twin(config)
        self._twin = twin
        self._flush()
        return twin

    def init_empty(self, project_id: str, config: dict = None) -> Twin:
        os.makedirs(self.root, exist_ok=True)
        self._twin = Twin(project_id)
        if config:
            self._twin.configure(dict(config))
        self._flush()
        return self._twin

    def twin(self) -> Twin:
        if self._twin is None:
            if not self.exists():
                raise SiteTwinError(f"no project at {self.root}; run init first")
            project_id = "project"
            if os.path.exists(self.meta_path):
                with open(self.meta_path, encoding="utf-8") as fh:
                    project_id = json.load(fh).get("project_id", project_id)
            with open(self.events_path, encoding="utf-8") as fh:
                events = [json.loads(line) for line in fh if line.strip()]
            self._twin = Twin.from_events(project_id, events)
        return self._twin

    def _flush(self):
        tmp = self.events_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            for ev in self._twin.events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
        os.replace(tmp, self.events_path)
        with open(self.meta_path, "w", encoding="utf-8") as fh:
            json.dump({"project_id": self._twin.project_id}, fh)

    def mutate(self, fn):
        """Run a mutation under the writer lock and persist the log."""
        with self.lock:
            twin = self.twin()
            result = fn(twin)
            self._flush()
            return twin, result


def _check_version(twin: Twin, expected):
    if expected is not None and int(expected) != twin.version:
        raise HTTPException(status_code=409,
                            detail={"error": "version conflict",
                                    "expected": int(expected),
                                    "actual": twin.version})


def create_app(store: ProjectStore) -> FastAPI:
    app = FastAPI(title="sitetwin", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def twin() -> Twin:
        try:
            return store.twin()
        except SiteTwinError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/project")
    def project():
        t = twin()
        weeks = sorted(t.weekly)
        return {
            "project_id": t.project_id,
            "version": t.version,
            "weeks_run": weeks,
            "activities": t.network.ids() if t.network else [],
            "overtime": t.overtime_report(max(weeks)) if weeks else None,
            "decision_log": t.decision_log,
            "classification": t.classification_report(),
        }

    @app.get("/forecast")
    def forecast():
        t = twin()
        series = [{"week": w, "p50": t.weekly[w].p50, "p80": t.weekly[w].p80,
                   "version": t.weekly[w].version}
                  for w in sorted(t.weekly)]
        if not series and t.network and t.beliefs:
            fc = monte_carlo_forecast(t.network, t.beliefs,
                                      int(t.config["n_samples"]),
                                      int(t.config["seed"]))
            return {"version": t.version, "series": [],
                    "prior": {"p50": fc.p50_finish, "p80": fc.p80_finish,
                              "histogram": list(fc.finish_histogram)}}
        latest = t.weekly[max(t.weekly)] if t.weekly else None
        return {"version": t.version, "series": series,
                "latest_histogram": list(latest.histogram) if latest else [],
                "actual_finish": 128.0 if t.project_id == "dfw-midrise" else None}

    @app.get("/evm")
    def evm():
        t = twin()
        from .evm import s_curves, compute_metrics, EvmPoint
        if not t.evm_points:
            return {"version": t.version, "periods": [], "metrics": []}
        curves = s_curves(t.evm_points)
        metrics = []
        for i, period in enumerate(curves["periods"]):
            point = EvmPoint(period=period, pv=curves["pv"][i],
                             ev=curves["ev"][i], ac=curves["ac"][i])
            m = compute_metrics(point)
            metrics.append({"period": period, "spi": m.spi, "cpi": m.cpi,
                            "sv_pct": m.sv_pct, "cv_pct": m.cv_pct})
        return {"version": t.version, "curves": curves, "metrics": metrics,
                "quantities": [
                    {"work_package": q.work_package, "planned": q.planned,
                     "measured": q.measured, "variance_pct": q.variance_pct}
                    for q in t.quantities]}

    @app.get("/buffers")
    def buffers():
        t = twin()
        if t.buffer is None:
            return {"version": t.version, "weeks": [], "percent_used": 0.0}
        series = []
        cp = cf = 0.0
        for i, (pd, fd) in enumerate(zip(t.buffer.project_deltas,
                                         t.buffer.feeding_deltas), start=1):
            cp += pd
            cf += fd
            series.append({"week": i, "project_delta": pd, "feeding_delta": fd,
                           "cumulative_project": cp, "cumulative_feeding": cf,
                           "percent_used": cp / t.buffer.project_buffer_size * 100.0})
        return {"version": t.version,
                "project_buffer_size": t.buffer.project_buffer_size,
                "feeding_buffer_size": t.buffer.feeding_buffer_size,
                "weeks": series,
                "percent_used": t.buffer.percent_used}

    @app.get("/criticality")
    def criticality():
        t = twin()
        if not t.weekly:
            return {"version": t.version, "weeks": {}}
        return {"version": t.version,
                "weeks": {str(w): t.weekly[w].criticality for w in sorted(t.weekly)},
                "latest": t.weekly[max(t.weekly)].criticality}

    @app.get("/recommendations")
    def recommendations():
        t = twin()
        return {"version": t.version,
                "recommendations": [
                    {"action_id": r.action_id, "week": r.week,
                     "summary": r.summary, "kind": r.action.kind,
                     "predicted_overtime_delta": r.predicted_overtime_delta,
                     "status": r.status, "reason": r.reason}
                    for _, r in sorted(t.recommendations.items())]}

    @app.post("/ingest/{kind}")
    def ingest(kind: str, body: dict):
        payload = body.get("payload")
        if payload is None:
            raise HTTPException(status_code=400, detail="missing payload")
        try:
            def fn(t):
                _check_version(t, body.get("expected_version"))
                t.ingest(kind, payload)
                return t.version
            t, version = store.mutate(fn)
        except UnknownKind as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except SchemaViolation as exc:
            raise HTTPException(status_code=422, detail={
                "error": str(exc), "row": exc.row, "column": exc.column})
        return {"version": version}

    @app.post("/week/{n}/run")
    def run_week(n: int, body: dict = None):
        body = body or {}
        try:
            def fn(t):
                _check_version(t, body.get("expected_version"))
                return t.run_week(n, body.get("config"))
            t, result = store.mutate(fn)
        except SiteTwinError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"version": t.version, "result": result.to_dict()}

    @app.post("/recommendations/{action_id}/decision")
    def decide(action_id: str, body: dict):
        if "adopted" not in body:
            raise HTTPException(status_code=400, detail="missing 'adopted'")
        try:
            def fn(t):
                _check_version(t, body.get("expected_version"))
                return t.decide(action_id, bool(body["adopted"]),
                                body.get("reason", ""))
            t, entry = store.mutate(fn)
        except AlreadyDecided as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except MakespanDegradation as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except SiteTwinError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"version": t.version, "entry": entry}

    @app.post("/scenarios/evaluate")
    def scenarios_evaluate(body: dict):
        t = twin()
        try:
            scenario = Scenario.from_dict(body["scenario"])
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        n = int(body.get("n", t.config["n_samples"]))
        seed = int(body.get("seed", t.config["seed"]))
        view = SandboxView(
            network=t.network,
            beliefs=dict(t.prior_beliefs),
            resources=t.resources,
            overhead_day_rate=float(t.config["overhead_day_rate"]),
            direct_costs=_direct_costs(t),
        )
        try:
            result = evaluate_scenario(view, scenario, n, seed)
        except SiteTwinError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store._scenario_results[scenario.name] = result
        return {"version": t.version, "result": {
            "name": result.name,
            "d_finish_p50": result.d_finish_p50,
            "d_finish_p80": result.d_finish_p80,
            "d_cost_p50": result.d_cost_p50,
            "d_cost_p80": result.d_cost_p80,
            "notes": result.notes}}

    @app.get("/tornado")
    def tornado_view():
        t = twin()
        results = list(store._scenario_results.values())
        if not results:
            return {"version": t.version, "rows": []}
        return {"version": t.version, "rows": tornado(results)}

    @app.get("/hypotheses")
    def hypotheses():
        t = twin()
        horizon = max(t.evidence.keys(), default=16)
        try:
            summary = summarize_twin(t, weeks=horizon)
            report = hypothesis_report(summary)
        except IncompleteReplay as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"version": t.version, "hypotheses": [
            {"hypothesis": h.hypothesis, "threshold": h.threshold,
             "observed": h.observed, "verdict": h.verdict} for h in report]}

    @app.get("/ablation")
    def ablation(components: str = ""):
        t = twin()
        names = tuple(c for c in components.split(",") if c)
        try:
            row = run_ablation(None, names)
        except SiteTwinError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"version": t.version, "row": row}

    @app.get("/tornado.csv", response_class=PlainTextResponse)
    def tornado_csv_view():
        from .sandbox import tornado_csv
        results = list(store._scenario_results.values())
        if not results:
            return "rank,name,d_finish_p50,d_finish_p80,d_cost_p50,d_cost_p80,direction\n"
        return tornado_csv(tornado(results))

    return app


def _direct_costs(t: Twin) -> dict:
    costs = {}
    if t.network is None:
        return costs
    for act in t.network.activities:
        total = 0.0
        for item in t.ledger:
            if item.id.startswith(f"CI-{act.id}"):
                total += item.direct_cost
        costs[act.id] = total
    return costs


def serve(project_dir: str, host: str = "127.0.0.1", port: int = 8008):
    """Run the service with uvicorn (blocking)."""
    import uvicorn
    store = ProjectStore(project_dir)
    app = create_app(store)
    uvicorn.run(app, host=host, port=port, log_level="warning")
