"""Loaders for the packaged demo-project fixture files."""

from __future__ import annotations

import csv
import json
from importlib import resources as importlib_resources

from .forecast import DurationBelief, ProgressEvidence
from .graph5d import CostItem
from .network import ActivityNetwork, network_from_dict
from .resources import Resource


def _path(name: str):
    return importlib_resources.files("sitetwin") / "fixtures" / name


def read_text(name: str) -> str:
    return _path(name).read_text(encoding="utf-8")


def load_network() -> ActivityNetwork:
    return network_from_dict(json.loads(read_text("network.json")))


def load_beliefs() -> dict:
    out = {}
    for row in csv.DictReader(read_text("beliefs.csv").splitlines()):
        out[row["activity_id"]] = DurationBelief(
            activity_id=row["activity_id"],
            mean=float(row["mean"]),
            sd=float(row["sd"]),
            family=row.get("family") or "normal-truncated-at-zero",
        )
    return out


def load_evidence() -> list:
    out = []
    for row in csv.DictReader(read_text("evidence.csv").splitlines()):
        out.append(ProgressEvidence(
            activity_id=row["activity_id"],
            week=int(row["week"]),
            percent_complete=float(row["percent_complete"]),
            elapsed=float(row["elapsed_days"]),
            observation_sd=float(row["observation_sd"]),
        ))
    return out


def load_evm_points() -> list:
    from .evm import EvmPoint
    points = []
    for row in csv.DictReader(read_text("evm.csv").splitlines()):
        points.append(EvmPoint(period=int(row["period"]), pv=float(row["pv"]),
                               ev=float(row["ev"]), ac=float(row["ac"])))
    return points


def load_quantities() -> list:
    rows = []
    for row in csv.DictReader(read_text("quantities.csv").splitlines()):
        rows.append((row["work_package"], float(row["planned"]), float(row["measured"])))
    return rows


def load_labor_phases() -> list:
    rows = []
    for row in csv.DictReader(read_text("labor_phases.csv").splitlines()):
        rows.append((row["phase"], float(row["manual_hours"]), float(row["automated_hours"])))
    return rows


def load_corpus() -> list:
    from .costmap import SpecLine
    rows = []
    for row in csv.DictReader(read_text("corpus.csv").splitlines()):
        rows.append(SpecLine(text=row["text"], true_division=row["true_division"]))
    return rows


def load_ruleset() -> dict:
    return json.loads(read_text("ruleset.json"))


def load_resources() -> dict:
    payload = json.loads(read_text("resources.json"))
    return {r["id"]: Resource(id=r["id"], capacity=float(r["capacity"]),
                              overtime_cap=float(r["overtime_cap"]),
                              hourly_cost=float(r.get("hourly_cost", 0.0)))
            for r in payload["resources"]}


def load_ledger() -> list:
    items = []
    for row in csv.DictReader(read_text("ledger.csv").splitlines()):
        items.append(CostItem(
            id=row["id"], csi_division=row["csi"],
            description=row["description"],
            unit_cost=float(row["unit_cost"]), quantity=float(row["quantity"]),
            kind=row["kind"], source="ledger",
        ))
    return items


def load_scenarios() -> list:
    return json.loads(read_text("scenarios.json"))["scenarios"]


def load_decision_plan() -> list:
    """Recorded weekly recommendations with the adoption pattern."""
    return json.loads(read_text("decision_plan.json"))["decisions"]


def load_indices() -> dict:
    return json.loads(read_text("indices.json"))
