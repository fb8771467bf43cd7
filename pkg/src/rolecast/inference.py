"""Role prediction: verbalize -> score -> constraint-filter -> argmax -> threshold.

For one candidate, the premise is the sentence containing the event
trigger. The roles considered are exactly those the constraint table
allows for the (event subtype, entity type) pair; candidates allowed no
role are labeled NEGATIVE without touching the backend. Each considered
role is scored as the max entail probability over its applicable
templates, the argmax role wins, and the prediction falls back to
NEGATIVE when the winning score sits below the threshold. Neutral and
contradiction probabilities are recorded for analysis but never rank.

Ties on the winning score break lexicographically by role name so that
identical inputs always produce identical predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import ConstraintTable
from .corpus import NEGATIVE, Candidate, Document, generate_candidates
from .errors import RolecastError
from .ioutil import dumps_canonical, read_jsonl
from .templates import EventContext, TemplateLibrary, verbalize_role_set


class InferenceError(RolecastError):
    pass


@dataclass(frozen=True)
class InferenceConfig:
    threshold: float = 0.5
    aggregation: str = "max"
    premise_scope: str = "trigger-sentence"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise InferenceError(f"threshold {self.threshold} outside [0, 1]")
        if self.aggregation != "max":
            raise InferenceError(f"unsupported aggregation {self.aggregation!r}")
        if self.premise_scope != "trigger-sentence":
            raise InferenceError(f"unsupported premise scope {self.premise_scope!r}")


@dataclass(frozen=True)
class TemplateScore:
    role: str
    template_id: str
    entail: float
    neutral: float
    contradict: float


@dataclass(frozen=True)
class RolePrediction:
    candidate: Candidate
    predicted: str  # role label or NEGATIVE
    scores: tuple[TemplateScore, ...] = ()
    winning_role_score: float = 0.0

    @property
    def per_template_scores(self) -> list[tuple[str, str, float]]:
        return [(s.role, s.template_id, s.entail) for s in self.scores]


def _candidate_plan(candidate: Candidate, doc: Document, library: TemplateLibrary,
                    table: ConstraintTable, roles_override=None):
    """Premise and (role, template_id, hypothesis) rows for one candidate.

    Returns (premise, rows); rows is empty when no role is allowed or
    every allowed role is scope-filtered out for this event subtype.
    """
    event = doc.event_by_id(candidate.event_id)
    entity = doc.entity_by_id(candidate.entity_id)
    sentence_index = doc.trigger_sentence_index(event)
    if sentence_index is None:
        raise InferenceError(
            f"event {event.id!r} trigger lies outside every sentence of {doc.id!r}"
        )
    premise = doc.sentence_text(sentence_index)

    if roles_override is not None:
        roles = set(roles_override)
    else:
        roles = table.allowed_roles(event.event_subtype, entity.entity_type)
    if not roles:
        return premise, []
    missing = sorted(roles - set(library.templates))
    if missing:
        raise InferenceError(f"library has no templates for allowed role(s) {missing}")
    ctx = EventContext(
        trigger_surface=event.trigger_surface,
        event_type=event.event_type,
        event_subtype=event.event_subtype,
    )
    return premise, verbalize_role_set(library, ctx, entity.surface, roles)


def _decide(candidate: Candidate, rows, judgments, threshold: float) -> RolePrediction:
    scores = tuple(
        TemplateScore(role, template_id, j.entail, j.neutral, j.contradict)
        for (role, template_id, _), j in zip(rows, judgments)
    )
    if not scores:
        return RolePrediction(candidate, NEGATIVE)
    best_by_role: dict[str, float] = {}
    for s in scores:
        best_by_role[s.role] = max(best_by_role.get(s.role, 0.0), s.entail)
    winner = min(best_by_role, key=lambda role: (-best_by_role[role], role))
    winning_score = best_by_role[winner]
    predicted = winner if winning_score >= threshold else NEGATIVE
    return RolePrediction(candidate, predicted, scores, winning_score)


def predict_role(candidate: Candidate, doc: Document, library: TemplateLibrary,
                 table: ConstraintTable, scorer, config: InferenceConfig | None = None,
                 roles_override=None) -> RolePrediction:
    config = config or InferenceConfig()
    premise, rows = _candidate_plan(candidate, doc, library, table, roles_override)
    if not rows:
        return RolePrediction(candidate, NEGATIVE)
    judgments = scorer.score_batch([(premise, hypothesis) for _, _, hypothesis in rows])
    return _decide(candidate, rows, judgments, config.threshold)


def predict_document(doc: Document, library: TemplateLibrary, table: ConstraintTable,
                     scorer, config: InferenceConfig | None = None) -> list[RolePrediction]:
    """Predictions for every candidate of the document, in candidate order.

    All hypotheses are gathered into one batched scoring call; results are
    identical to calling predict_role per candidate.
    """
    config = config or InferenceConfig()
    candidates = generate_candidates(doc)
    plans = [(c, *_candidate_plan(c, doc, library, table)) for c in candidates]
    flat = [(premise, hypothesis)
            for _, premise, rows in plans
            for _, _, hypothesis in rows]
    judgments = scorer.score_batch(flat) if flat else []
    out = []
    cursor = 0
    for candidate, _, rows in plans:
        chunk = judgments[cursor:cursor + len(rows)]
        cursor += len(rows)
        out.append(_decide(candidate, rows, chunk, config.threshold))
    return out


def rethreshold(predictions, threshold: float) -> list[RolePrediction]:
    """Re-decide stored predictions at a new threshold without re-scoring.

    Useful for dev-set threshold sweeps: the per-template scores already
    carry everything the decision rule needs.
    """
    InferenceConfig(threshold=threshold)  # range check
    out = []
    for pred in predictions:
        rows = [(s.role, s.template_id, "") for s in pred.scores]
        out.append(_decide(pred.candidate, rows, [_JudgmentView(s) for s in pred.scores], threshold))
    return out


class _JudgmentView:
    """Adapter so _decide can re-read stored TemplateScore rows."""

    def __init__(self, score: TemplateScore):
        self.entail = score.entail
        self.neutral = score.neutral
        self.contradict = score.contradict


# ---------------------------------------------------------------------------
# Prediction dump: one JSON record per candidate

def prediction_to_record(pred: RolePrediction) -> dict:
    return {
        "doc": pred.candidate.document_id,
        "event": pred.candidate.event_id,
        "entity": pred.candidate.entity_id,
        "predicted": pred.predicted,
        "score": pred.winning_role_score,
        "scores": [
            {"role": s.role, "template": s.template_id, "entail": s.entail,
             "neutral": s.neutral, "contradict": s.contradict}
            for s in pred.scores
        ],
    }


def write_predictions(predictions, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pred in predictions:
            fh.write(dumps_canonical(prediction_to_record(pred)))
            fh.write("\n")


def read_predictions(path) -> list[dict]:
    records = []
    for lineno, record in read_jsonl(path, error=InferenceError):
        if not isinstance(record, dict):
            raise InferenceError(f"{path}, line {lineno}: expected an object")
        for key in ("doc", "event", "entity", "predicted"):
            if key not in record:
                raise InferenceError(f"{path}, line {lineno}: prediction record missing {key!r}")
        records.append(record)
    return records
