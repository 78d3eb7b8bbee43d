"""Command-line interface over a project directory (event-log backed).

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import SiteTwinError
from .sandbox import SandboxView, Scenario, evaluate as evaluate_scenario, tornado, tornado_csv
from .service import ProjectStore, _direct_costs, serve
from .stats import hypothesis_report, run_ablation
from .twin import drive_weeks, summarize_twin


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sitetwin",
                                description="project-control twin engine")
    p.add_argument("--project", default="./project", help="project directory")
    p.add_argument("--seed", type=int, default=None, help="override RNG seed")
    p.add_argument("--samples", type=int, default=None,
                   help="override Monte Carlo sample count")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init", help="create a project")
    sp.add_argument("--demo", action="store_true",
                    help="seed with the packaged 18-activity fixture project")
    sp.add_argument("--id", default="project", help="project id for empty init")

    sp = sub.add_parser("ingest", help="ingest a data file")
    sp.add_argument("kind", help="network|beliefs|evidence|ledger|evm|quantities|"
                                 "corpus|indices|resources|decision_plan")
    sp.add_argument("path", help="file to ingest")

    sp = sub.add_parser("week", help="run one weekly control cycle")
    sp.add_argument("n", type=int)
    sp.add_argument("--auto-decide", action="store_true",
                    help="apply the recorded decision plan for the week")

    sub.add_parser("forecast", help="print the current forecast series")
    sub.add_parser("evm", help="print earned-value metrics")

    sp = sub.add_parser("recommend", help="list recommendations")
    sp.add_argument("--week", type=int, default=None)

    sp = sub.add_parser("decide", help="adopt or reject a recommendation")
    sp.add_argument("action_id")
    sp.add_argument("verdict", choices=["adopt", "reject"])
    sp.add_argument("--reason", default="")

    sp = sub.add_parser("whatif", help="evaluate a scenario file")
    sp.add_argument("path", help="scenario JSON (single scenario or fixture list)")
    sp.add_argument("--name", default=None, help="scenario name when file holds many")

    sp = sub.add_parser("tornado", help="rank scenario results from a results file")
    sp.add_argument("path", nargs="?", default=None,
                    help="JSON list of scenario results; default: evaluate fixtures")

    sub.add_parser("report", help="print the replay scorecard and hypotheses")

    sp = sub.add_parser("ablate", help="re-run the replay with components removed")
    sp.add_argument("components", help="comma list from nlp,cv,bayes,drl (or 'none')")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8008)
    return p


def _overrides(args) -> dict:
    cfg = {}
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.samples is not None:
        cfg["n_samples"] = args.samples
    return cfg


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    store = ProjectStore(args.project)
    try:
        return _dispatch(args, store)
    except SiteTwinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, store: ProjectStore) -> int:
    cfg = _overrides(args)

    if args.command == "init":
        if store.exists():
            print(f"error: project already exists at {args.project}", file=sys.stderr)
            return 2
        twin = store.init_demo(cfg) if args.demo else store.init_empty(args.id, cfg)
        print(f"initialized {twin.project_id} at {args.project} "
              f"(version {twin.version})")
        return 0

    if args.command == "ingest":
        with open(args.path, encoding="utf-8") as fh:
            payload = fh.read()
        _, version = store.mutate(lambda t: t.ingest(args.kind, payload).version)
        print(f"ingested {args.kind}; version {version}")
        return 0

    if args.command == "week":
        def fn(t):
            if cfg:
                t.configure(cfg)
            result = t.run_week(args.n)
            if args.auto_decide:
                plan = t.decision_plan.get(args.n)
                if plan and plan["action_id"] in t.recommendations \
                        and not t.recommendations[plan["action_id"]].decided():
                    t.decide(plan["action_id"], bool(plan["adopted"]),
                             plan.get("reason", ""))
            return result
        _, result = store.mutate(fn)
        print(f"week {result.week}: p50 {result.p50:.2f} p80 {result.p80:.2f} "
              f"buffer {result.buffer_percent_used:.1f}% "
              f"overtime {result.optimized_overtime:.0f}h"
              + (" [no evidence]" if result.evidence_missing else ""))
        return 0

    if args.command == "forecast":
        t = store.twin()
        if not t.weekly:
            from .forecast import monte_carlo_forecast
            fc = monte_carlo_forecast(t.network, t.beliefs,
                                      int(cfg.get("n_samples", t.config["n_samples"])),
                                      int(cfg.get("seed", t.config["seed"])))
            print(f"prior forecast: p50 {fc.p50_finish:.2f} p80 {fc.p80_finish:.2f}")
            return 0
        print("week,p50,p80")
        for w in sorted(t.weekly):
            r = t.weekly[w]
            print(f"{w},{r.p50:.2f},{r.p80:.2f}")
        return 0

    if args.command == "evm":
        t = store.twin()
        from .evm import s_curves, compute_metrics, EvmPoint
        if not t.evm_points:
            print("no EVM data ingested")
            return 0
        curves = s_curves(t.evm_points)
        print("period,spi,cpi,sv_pct,cv_pct")
        for i, period in enumerate(curves["periods"]):
            m = compute_metrics(EvmPoint(period=period, pv=curves["pv"][i],
                                         ev=curves["ev"][i], ac=curves["ac"][i]))
            print(f"{period},{m.spi:.4f},{m.cpi:.4f},{m.sv_pct:+.2f},{m.cv_pct:+.2f}")
        print(f"crossover: month {curves['crossover']}")
        return 0

    if args.command == "recommend":
        t = store.twin()
        for _, rec in sorted(t.recommendations.items()):
            if args.week and rec.week != args.week:
                continue
            print(f"{rec.action_id} w{rec.week:02d} [{rec.status:8s}] "
                  f"{rec.summary} (dOT {rec.predicted_overtime_delta:+.1f}h)"
                  + (f" reason: {rec.reason}" if rec.reason else ""))
        return 0

    if args.command == "decide":
        def fn(t):
            return t.decide(args.action_id, args.verdict == "adopt", args.reason)
        _, entry = store.mutate(fn)
        print(f"{entry['action_id']} -> {entry['status']}")
        return 0

    if args.command == "whatif":
        t = store.twin()
        with open(args.path, encoding="utf-8") as fh:
            payload = json.load(fh)
        scenarios = payload["scenarios"] if "scenarios" in payload else [payload]
        if args.name:
            scenarios = [s for s in scenarios if s["name"] == args.name]
            if not scenarios:
                print(f"error: no scenario named {args.name}", file=sys.stderr)
                return 2
        view = SandboxView(network=t.network, beliefs=dict(t.prior_beliefs),
                           resources=t.resources,
                           overhead_day_rate=float(t.config["overhead_day_rate"]),
                           direct_costs=_direct_costs(t))
        n = int(cfg.get("n_samples", t.config["n_samples"]))
        seed = int(cfg.get("seed", t.config["seed"]))
        print("name,d_finish_p50,d_finish_p80,d_cost_p50_k,d_cost_p80_k")
        for sc_payload in scenarios:
            r = evaluate_scenario(view, Scenario.from_dict(sc_payload), n, seed)
            print(f"{r.name},{r.d_finish_p50:+.2f},{r.d_finish_p80:+.2f},"
                  f"{r.d_cost_p50:+.2f},{r.d_cost_p80:+.2f}")
        return 0

    if args.command == "tornado":
        t = store.twin()
        from .sandbox import ScenarioResult
        if args.path:
            with open(args.path, encoding="utf-8") as fh:
                rows = json.load(fh)
            results = [ScenarioResult(**r) for r in rows]
        else:
            from . import fixtures
            view = SandboxView(network=t.network, beliefs=dict(t.prior_beliefs),
                               resources=t.resources,
                               overhead_day_rate=float(t.config["overhead_day_rate"]),
                               direct_costs=_direct_costs(t))
            n = int(cfg.get("n_samples", t.config["n_samples"]))
            seed = int(cfg.get("seed", t.config["seed"]))
            results = [evaluate_scenario(view, Scenario.from_dict(p), n, seed)
                       for p in fixtures.load_scenarios()]
        sys.stdout.write(tornado_csv(tornado(results)))
        return 0

    if args.command == "report":
        t = store.twin()
        summary = summarize_twin(t, weeks=max(t.evidence.keys(), default=16))
        print(f"schedule MAPE: {summary.schedule_mape_pct:.2f}%")
        print(f"cost MAPE: {summary.cost_mape_pct:.2f}%")
        print(f"labor reduction: {summary.labor_reduction_pct:.1f}%")
        print(f"final SPI/CPI: {summary.final_spi:.3f}/{summary.final_cpi:.3f}")
        print(f"overtime reduction: {summary.overtime_reduction_pct:.2f}%")
        print(f"project buffer used: {summary.buffer_percent_used:.1f}%")
        for h in hypothesis_report(summary):
            print(f"{h.hypothesis}: {h.verdict} "
                  f"(observed {h.observed:.2f}; rule: {h.threshold})")
        return 0

    if args.command == "ablate":
        names = () if args.components == "none" else \
            tuple(c for c in args.components.split(",") if c)
        row = run_ablation(None, names)
        print(json.dumps(row, indent=2))
        return 0

    if args.command == "serve":
        serve(args.project, host=args.host, port=args.port)
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
