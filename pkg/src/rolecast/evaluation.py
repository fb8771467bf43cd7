"""Metrics: micro F1, coref-credited F1, AUC over training fractions,
per-role recall diffs between two prediction sets, and report rendering.

F1 is micro-averaged over argument decisions. For a candidate with gold
role G and prediction P:

    G != NEGATIVE, P == G            -> TP for G
    P != NEGATIVE, P != G            -> FP for P (and FN for G when gold)
    G != NEGATIVE, P in {NEGATIVE,*} -> FN for G

Gold arguments that candidate generation cannot reach (mention outside the
trigger sentence) are passed in separately and charged as FN, so recall is
honest about sentence-level extraction limits. A correct role predicted on
the wrong mention of a coreferent entity stays FP+FN in plain scoring;
the coref variant credits it.

AUC is the trapezoidal integral of F1 over the fraction axis, normalized
by the axis span — the single-number summary for comparing few-shot
curves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import NEGATIVE, Candidate
from .errors import RolecastError
from .ioutil import dumps_pretty


class EvalError(RolecastError):
    pass


@dataclass
class RoleCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


@dataclass
class EvalResult:
    precision: float
    recall: float
    f1: float
    per_role: dict[str, RoleCounts] = field(default_factory=dict)


def _f1(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def _predicted_labels(candidates, predictions) -> list[str]:
    """Aligned predicted-role labels; accepts strings or RolePrediction-likes."""
    candidates = list(candidates)
    predictions = list(predictions)
    if len(predictions) != len(candidates):
        raise EvalError(
            f"{len(predictions)} predictions for {len(candidates)} candidates"
        )
    labels = []
    for i, (candidate, pred) in enumerate(zip(candidates, predictions)):
        if isinstance(pred, str):
            labels.append(pred)
            continue
        ref = getattr(pred, "candidate", None)
        if ref is not None and ref.key != candidate.key:
            raise EvalError(f"prediction {i} is for {ref.key}, expected {candidate.key}")
        labels.append(pred.predicted)
    return labels


def score_f1(candidates, predictions, unreachable=()) -> EvalResult:
    """Micro-averaged P/R/F1 plus per-role counts.

    `unreachable` lists gold arguments no candidate covers (as Candidate
    records); each one is a false negative for its role.
    """
    candidates = list(candidates)
    labels = _predicted_labels(candidates, predictions)
    per_role: dict[str, RoleCounts] = {}

    def counts(role: str) -> RoleCounts:
        return per_role.setdefault(role, RoleCounts())

    for candidate, predicted in zip(candidates, labels):
        gold = candidate.gold_role
        if predicted != NEGATIVE and predicted == gold:
            counts(gold).tp += 1
        else:
            if predicted != NEGATIVE:
                counts(predicted).fp += 1
            if gold != NEGATIVE:
                counts(gold).fn += 1
    for missed in unreachable:
        counts(missed.gold_role).fn += 1

    tp = sum(c.tp for c in per_role.values())
    fp = sum(c.fp for c in per_role.values())
    fn = sum(c.fn for c in per_role.values())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalResult(precision, recall, _f1(precision, recall), per_role)


def coref_index(docs) -> dict[tuple[str, str], frozenset[str]]:
    """(document id, entity id) -> that mention's coreference chain."""
    index = {}
    for doc in docs:
        for ent in doc.entities:
            index[(doc.id, ent.id)] = doc.chain_of(ent.id)
    return index


def score_coref_f1(candidates, predictions, chains, unreachable=()) -> EvalResult:
    """F1 where a gold argument counts as recovered when any mention in its
    coref chain is predicted with the gold role for that event.

    `chains` comes from :func:`coref_index`. With singleton chains this
    reduces exactly to plain score_f1.
    """
    candidates = list(candidates)
    labels = _predicted_labels(candidates, predictions)

    def chain(doc_id: str, entity_id: str) -> frozenset[str]:
        return chains.get((doc_id, entity_id), frozenset({entity_id}))

    predicted_by_event: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for candidate, predicted in zip(candidates, labels):
        if predicted != NEGATIVE:
            predicted_by_event.setdefault(
                (candidate.document_id, candidate.event_id), set()
            ).add((candidate.entity_id, predicted))

    gold_args = [c for c in candidates if c.is_positive] + list(unreachable)
    gold_by_event: dict[tuple[str, str], list[Candidate]] = {}
    for g in gold_args:
        gold_by_event.setdefault((g.document_id, g.event_id), []).append(g)

    per_role: dict[str, RoleCounts] = {}

    def counts(role: str) -> RoleCounts:
        return per_role.setdefault(role, RoleCounts())

    recovered_total = 0
    for g in gold_args:
        event_key = (g.document_id, g.event_id)
        members = chain(g.document_id, g.entity_id)
        hit = any(
            (entity_id, g.gold_role) in predicted_by_event.get(event_key, set())
            for entity_id in members
        )
        if hit:
            counts(g.gold_role).tp += 1
            recovered_total += 1
        else:
            counts(g.gold_role).fn += 1

    correct_predictions = 0
    total_predictions = 0
    for candidate, predicted in zip(candidates, labels):
        if predicted == NEGATIVE:
            continue
        total_predictions += 1
        members = chain(candidate.document_id, candidate.entity_id)
        event_key = (candidate.document_id, candidate.event_id)
        ok = any(
            g.gold_role == predicted and g.entity_id in members
            for g in gold_by_event.get(event_key, [])
        )
        if ok:
            correct_predictions += 1
        else:
            counts(predicted).fp += 1

    precision = correct_predictions / total_predictions if total_predictions else 0.0
    recall = recovered_total / len(gold_args) if gold_args else 0.0
    return EvalResult(precision, recall, _f1(precision, recall), per_role)


# ---------------------------------------------------------------------------
# Area under the F1-vs-training-fraction curve

@dataclass(frozen=True)
class CurvePoint:
    fraction: float  # percentage of training data, in [0, 100]
    f1: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 100.0:
            raise EvalError(f"fraction {self.fraction} outside [0, 100]")


def auc(points) -> float:
    """Trapezoidal integral of F1 over the fraction axis / axis span."""
    points = [p if isinstance(p, CurvePoint) else CurvePoint(*p) for p in points]
    if len(points) < 2:
        raise EvalError(f"AUC needs at least 2 curve points, got {len(points)}")
    points = sorted(points, key=lambda p: p.fraction)
    fractions = [p.fraction for p in points]
    if len(set(fractions)) != len(fractions):
        raise EvalError(f"duplicate fractions in curve: {fractions}")
    area = 0.0
    for left, right in zip(points, points[1:]):
        area += (right.fraction - left.fraction) * (left.f1 + right.f1) / 2.0
    return area / (points[-1].fraction - points[0].fraction)


def read_curve_file(path) -> list[CurvePoint]:
    """Parse `fraction,f1` comma-separated lines (blank lines skipped)."""
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise EvalError(f"{path}, line {lineno}: expected 'fraction,f1'")
            try:
                points.append(CurvePoint(float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise EvalError(f"{path}, line {lineno}: {exc}") from exc
    return points


# ---------------------------------------------------------------------------
# Developer comparison

@dataclass(frozen=True)
class RecallDiff:
    a_only: float
    b_only: float

    @property
    def same(self) -> bool:
        """Neither side recovered anything the other missed."""
        return self.a_only == 0.0 and self.b_only == 0.0


def recall_diff(predictions_a, predictions_b, candidates, unreachable=()) -> dict[str, RecallDiff]:
    """Per-role fraction of gold arguments only one prediction set recovers.

    Both prediction sets must cover the same candidates. Denominators are
    all gold arguments of the role, including unreachable ones (which
    neither side can recover, keeping the two sides comparable).
    """
    candidates = list(candidates)
    labels_a = _predicted_labels(candidates, predictions_a)
    labels_b = _predicted_labels(candidates, predictions_b)

    totals: dict[str, int] = {}
    only_a: dict[str, int] = {}
    only_b: dict[str, int] = {}
    for candidate, a, b in zip(candidates, labels_a, labels_b):
        gold = candidate.gold_role
        if gold == NEGATIVE:
            continue
        totals[gold] = totals.get(gold, 0) + 1
        hit_a = a == gold
        hit_b = b == gold
        if hit_a and not hit_b:
            only_a[gold] = only_a.get(gold, 0) + 1
        elif hit_b and not hit_a:
            only_b[gold] = only_b.get(gold, 0) + 1
    for missed in unreachable:
        totals[missed.gold_role] = totals.get(missed.gold_role, 0) + 1

    return {
        role: RecallDiff(only_a.get(role, 0) / total, only_b.get(role, 0) / total)
        for role, total in totals.items()
    }


# ---------------------------------------------------------------------------
# Reports

def _fmt(x: float, digits: int = 4) -> str:
    return f"{x:.{digits}f}"


def report(result: EvalResult | None = None, curve=None, fmt: str = "markdown",
           threshold: float | None = None) -> str:
    """Render an evaluation report.

    `markdown` produces the human-facing tables (wide fraction layout when
    a curve is given, matching the usual six-column presentation);
    `json` produces the structured form that :func:`parse_report` reads
    back to the same numbers.
    """
    if fmt not in ("markdown", "json"):
        raise EvalError(f"unknown report format {fmt!r}")
    curve_points = None
    curve_auc = None
    if curve:
        curve_points = sorted(
            (p if isinstance(p, CurvePoint) else CurvePoint(*p) for p in curve),
            key=lambda p: p.fraction,
        )
        curve_auc = auc(curve_points) if len(curve_points) >= 2 else None

    if fmt == "json":
        payload: dict = {}
        if curve_points is not None:
            payload["curve"] = [{"fraction": p.fraction, "f1": p.f1} for p in curve_points]
            payload["auc"] = curve_auc
        if result is not None:
            payload["overall"] = {
                "precision": result.precision, "recall": result.recall, "f1": result.f1,
            }
            payload["per_role"] = {
                role: {"tp": c.tp, "fp": c.fp, "fn": c.fn, "recall": c.recall}
                for role, c in sorted(result.per_role.items())
            }
        if threshold is not None:
            payload["threshold"] = threshold
        return dumps_pretty(payload)

    lines = ["# Evaluation report", ""]
    if threshold is not None:
        lines += [f"threshold: {threshold}", ""]
    if curve_points is not None:
        lines += ["## F1 by training fraction", ""]
        header = [f"{p.fraction:g}%" for p in curve_points] + ["AUC"]
        values = [_fmt(p.f1, 2) for p in curve_points]
        values.append(_fmt(curve_auc, 2) if curve_auc is not None else "-")
        lines += [
            "| " + " | ".join(header) + " |",
            "|" + "---|" * len(header),
            "| " + " | ".join(values) + " |",
            "",
        ]
    if result is not None:
        lines += [
            "## Overall",
            "",
            "| precision | recall | f1 |",
            "|---|---|---|",
            f"| {_fmt(result.precision)} | {_fmt(result.recall)} | {_fmt(result.f1)} |",
            "",
        ]
        if result.per_role:
            lines += ["## Per role", "", "| role | tp | fp | fn | recall |", "|---|---|---|---|---|"]
            for role, c in sorted(result.per_role.items()):
                lines.append(f"| {role} | {c.tp} | {c.fp} | {c.fn} | {_fmt(c.recall)} |")
            lines.append("")
    return "\n".join(lines)


def parse_report(text: str) -> dict:
    """Read a JSON-format report back (round-trip counterpart of report)."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise EvalError(f"not a JSON report: {exc}") from exc
