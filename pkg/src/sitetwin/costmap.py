"""Keyword-rule spec-line classifier and the classification/labor-savings
evaluation harness.

The ruleset is data (division -> weighted keyword list), so coverage can be
extended without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SiteTwinError

UNCLASSIFIED = "unclassified"


class LengthMismatch(SiteTwinError):
    pass


class ZeroManual(SiteTwinError):
    pass


@dataclass(frozen=True)
class SpecLine:
    text: str
    true_division: str = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("spec line text must be non-empty")


@dataclass(frozen=True)
class DivisionScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class DivisionMetrics:
    per_division: dict  # division -> DivisionScore
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    micro_accuracy: float


_token_re = re.compile(r"[a-z0-9][a-z0-9\-]*")


def _tokens(text: str):
    return _token_re.findall(text.lower())


def classify(line: SpecLine, ruleset: dict) -> str:
    """Highest keyword-hit-weight division; ties break to the lowest code.

    ``ruleset`` maps division code -> {keyword: weight}. Multi-word keywords
    match as phrases against the lowercased text.
    """
    if not ruleset:
        raise ValueError("ruleset must be non-empty")
    text = line.text.lower()
    toks = set(_tokens(text))
    scores = {}
    for division, keywords in ruleset.items():
        score = 0.0
        for kw, weight in keywords.items():
            if " " in kw:
                if kw in text:
                    score += weight
            elif kw in toks:
                score += weight
        if score > 0:
            scores[division] = score
    if not scores:
        return UNCLASSIFIED
    best = max(scores.values())
    return min(d for d, s in scores.items() if s == best)


def evaluate(predictions, labels) -> DivisionMetrics:
    """One-vs-rest precision/recall/F1 from the confusion counts."""
    if len(predictions) != len(labels):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(labels)} labels")
    if not predictions:
        raise LengthMismatch("need at least one sample")
    divisions = sorted(set(labels))
    per = {}
    total_support = len(labels)
    correct = sum(1 for p, t in zip(predictions, labels) if p == t)
    wp = wr = wf = 0.0
    for d in divisions:
        tp = sum(1 for p, t in zip(predictions, labels) if p == d and t == d)
        fp = sum(1 for p, t in zip(predictions, labels) if p == d and t != d)
        fn = sum(1 for p, t in zip(predictions, labels) if p != d and t == d)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per[d] = DivisionScore(precision, recall, f1, support)
        wp += precision * support
        wr += recall * support
        wf += f1 * support
    return DivisionMetrics(
        per_division=per,
        weighted_precision=wp / total_support,
        weighted_recall=wr / total_support,
        weighted_f1=wf / total_support,
        micro_accuracy=correct / total_support,
    )


def labor_savings(phases) -> dict:
    """Per-phase labor reduction percents and their unweighted mean.

    ``phases`` is a list of (name, manual_hours, automated_hours).
    """
    out = {"phases": [], "average_pct": 0.0}
    for name, manual, automated in phases:
        if manual <= 0:
            raise ZeroManual(f"{name}: manual hours must be > 0")
        pct = (manual - automated) / manual * 100.0
        out["phases"].append({"phase": name, "manual_hours": manual,
                              "automated_hours": automated, "reduction_pct": pct})
    if out["phases"]:
        out["average_pct"] = sum(p["reduction_pct"] for p in out["phases"]) / len(out["phases"])
    return out
