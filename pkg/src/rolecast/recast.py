"""Convert argument candidates into premise/hypothesis training records.

Each positive candidate (gold role != NEGATIVE) yields up to `n_entail`
entailment records verbalized with its own role's templates and up to
`n_neutral` neutral records verbalized with templates of other roles.
Each negative candidate yields up to `n_contradict` contradiction records
verbalized with templates drawn uniformly from the whole library — unless
constrained sampling is on and the candidate matches no role of its event
subtype, in which case it is skipped entirely (the point of constrained
sampling is that the surviving negatives are the challenging ones).

Sampling is without replacement and capped by the number of applicable
templates, so duplicate premise/hypothesis pairs are never emitted for one
candidate. Every candidate derives its own RNG from (seed, doc, event,
entity), which makes the output byte-identical across reruns and immune
to corpus-level parallelism or candidate ordering.

The recast file plus a multi-source manifest are the contract with an
external trainer; this package never touches model weights. Relation
extraction corpora verbalized elsewhere slot into the same manifest since
the record format is task-agnostic.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .constraints import ConstraintTable
from .corpus import NEGATIVE, Candidate, Document, generate_candidates
from .errors import RolecastError
from .ioutil import dumps_canonical, dumps_pretty, read_jsonl
from .templates import EventContext, TemplateLibrary, verbalize

LABEL_ENTAILMENT = "entailment"
LABEL_NEUTRAL = "neutral"
LABEL_CONTRADICTION = "contradiction"
LABELS = (LABEL_ENTAILMENT, LABEL_NEUTRAL, LABEL_CONTRADICTION)


class RecastError(RolecastError):
    pass


@dataclass(frozen=True)
class SamplingConfig:
    """Per-candidate sampling rates; defaults follow the 2/5/5 recipe."""

    n_entail: int = 2
    n_neutral: int = 5
    n_contradict: int = 5
    constrained: bool = True
    seed: int = 0

    def __post_init__(self):
        for name, n in (("n_entail", self.n_entail), ("n_neutral", self.n_neutral),
                        ("n_contradict", self.n_contradict)):
            if n < 0:
                raise RecastError(f"{name} must be non-negative, got {n}")


@dataclass(frozen=True)
class NliExample:
    premise: str
    hypothesis: str
    label: str
    source: str
    document_id: str
    event_id: str
    entity_id: str
    gold_role: str
    template_id: str

    def to_record(self) -> dict:
        return {
            "premise": self.premise,
            "hypothesis": self.hypothesis,
            "label": self.label,
            "meta": {
                "source": self.source,
                "doc": self.document_id,
                "event": self.event_id,
                "entity": self.entity_id,
                "gold": self.gold_role,
                "template": self.template_id,
            },
        }


def candidate_rng(seed: int, candidate: Candidate) -> random.Random:
    """Deterministic RNG derived from the global seed and candidate identity."""
    key = f"{seed}|{candidate.document_id}|{candidate.event_id}|{candidate.entity_id}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _sample(pool, k: int, rng: random.Random):
    """Up to k items without replacement, in stable pool order."""
    if k <= 0 or not pool:
        return []
    if k >= len(pool):
        return list(pool)
    picked = set(rng.sample(range(len(pool)), k))
    return [item for i, item in enumerate(pool) if i in picked]


def recast_candidate(candidate: Candidate, doc: Document, library: TemplateLibrary,
                     table: ConstraintTable, config: SamplingConfig | None = None,
                     rng: random.Random | None = None, source: str = "") -> list[NliExample]:
    config = config or SamplingConfig()
    rng = rng or candidate_rng(config.seed, candidate)
    event = doc.event_by_id(candidate.event_id)
    entity = doc.entity_by_id(candidate.entity_id)
    sentence_index = doc.trigger_sentence_index(event)
    if sentence_index is None:
        raise RecastError(f"event {event.id!r} trigger lies outside every sentence of {doc.id!r}")
    premise = doc.sentence_text(sentence_index)
    ctx = EventContext(event.trigger_surface, event.event_type, event.event_subtype)

    def emit(template, label):
        return NliExample(
            premise=premise,
            hypothesis=verbalize(template, ctx, entity.surface, library.canonical_map),
            label=label,
            source=source,
            document_id=doc.id,
            event_id=event.id,
            entity_id=entity.id,
            gold_role=candidate.gold_role,
            template_id=template.id,
        )

    # Stable template pool, scope-filtered for this event subtype.
    applicable = [
        t for role in sorted(library.templates)
        for t in library.templates_for(role, event.event_subtype)
    ]

    if candidate.is_positive:
        if candidate.gold_role not in library.templates:
            raise RecastError(f"library has no templates for gold role {candidate.gold_role!r}")
        own = [t for t in applicable if t.role == candidate.gold_role]
        others = [t for t in applicable if t.role != candidate.gold_role]
        examples = [emit(t, LABEL_ENTAILMENT) for t in _sample(own, config.n_entail, rng)]
        examples += [emit(t, LABEL_NEUTRAL) for t in _sample(others, config.n_neutral, rng)]
        return examples

    if config.constrained and not table.satisfies_any(event.event_subtype, entity.entity_type):
        return []
    return [emit(t, LABEL_CONTRADICTION) for t in _sample(applicable, config.n_contradict, rng)]


@dataclass
class RecastSummary:
    total: int = 0
    entailment: int = 0
    neutral: int = 0
    contradiction: int = 0
    candidates: int = 0
    skipped_negatives: int = 0
    seed: int = 0
    source: str = ""

    def to_record(self) -> dict:
        return {
            "total": self.total,
            "entailment": self.entailment,
            "neutral": self.neutral,
            "contradiction": self.contradiction,
            "candidates": self.candidates,
            "skipped_negatives": self.skipped_negatives,
            "seed": self.seed,
            "source": self.source,
        }


def recast_examples(docs, library: TemplateLibrary, table: ConstraintTable,
                    config: SamplingConfig | None = None, source: str = "",
                    candidates=None):
    """Yield NliExample records in deterministic corpus order.

    `candidates` restricts conversion to a subset (e.g. a few-shot split);
    the subset's own order is preserved. Without it, every candidate of
    every document is converted.
    """
    config = config or SamplingConfig()
    docs = list(docs)
    by_id = {doc.id: doc for doc in docs}
    if candidates is None:
        candidates = [c for doc in docs for c in generate_candidates(doc)]
    for candidate in candidates:
        if candidate.document_id not in by_id:
            raise RecastError(f"candidate references unknown document {candidate.document_id!r}")
        doc = by_id[candidate.document_id]
        yield from recast_candidate(candidate, doc, library, table, config, source=source)


def recast_corpus(docs, library: TemplateLibrary, table: ConstraintTable, out_path,
                  config: SamplingConfig | None = None, source: str = "",
                  candidates=None) -> RecastSummary:
    """Write the recast file and return label counts consistent with it."""
    config = config or SamplingConfig()
    docs = list(docs)
    if candidates is None:
        candidates = [c for doc in docs for c in generate_candidates(doc)]
    else:
        candidates = list(candidates)
    summary = RecastSummary(seed=config.seed, source=source, candidates=len(candidates))
    negatives_kept = set()
    with open(out_path, "w", encoding="utf-8") as fh:
        for example in recast_examples(docs, library, table, config, source, candidates):
            fh.write(dumps_canonical(example.to_record()))
            fh.write("\n")
            summary.total += 1
            if example.label == LABEL_ENTAILMENT:
                summary.entailment += 1
            elif example.label == LABEL_NEUTRAL:
                summary.neutral += 1
            else:
                summary.contradiction += 1
            if example.gold_role == NEGATIVE:
                negatives_kept.add((example.document_id, example.event_id, example.entity_id))
    total_negatives = sum(1 for c in candidates if not c.is_positive)
    summary.skipped_negatives = total_negatives - len(negatives_kept)
    return summary


def read_recast_file(path) -> list[NliExample]:
    examples = []
    for lineno, record in read_jsonl(path, error=RecastError):
        if not isinstance(record, dict) or not isinstance(record.get("meta"), dict):
            raise RecastError(f"{path}, line {lineno}: expected an object with a 'meta' object")
        try:
            meta = record["meta"]
            examples.append(NliExample(
                premise=record["premise"],
                hypothesis=record["hypothesis"],
                label=record["label"],
                source=meta["source"],
                document_id=meta["doc"],
                event_id=meta["event"],
                entity_id=meta["entity"],
                gold_role=meta["gold"],
                template_id=meta["template"],
            ))
        except (KeyError, TypeError) as exc:
            raise RecastError(f"{path}, line {lineno}: malformed record ({exc})") from exc
        if examples[-1].label not in LABELS:
            raise RecastError(f"{path}, line {lineno}: unknown label {examples[-1].label!r}")
    return examples


# ---------------------------------------------------------------------------
# Multi-source sequential fine-tuning manifests

@dataclass(frozen=True)
class ManifestStage:
    name: str
    path: str
    epochs: int = 25  # external-trainer hint; small split runs usually take 50


@dataclass
class MultiSourceManifest:
    """Ordered fine-tuning stages; the target task is always last."""

    stages: list[ManifestStage] = field(default_factory=list)

    def to_record(self) -> dict:
        return {"stages": [{"name": s.name, "path": s.path, "epochs": s.epochs}
                           for s in self.stages]}


def build_manifest(sources, target) -> MultiSourceManifest:
    """Sources in the given order, target appended last; names unique."""
    sources = [s if isinstance(s, ManifestStage) else ManifestStage(*s) for s in sources]
    if not sources:
        raise RecastError("manifest needs at least one source stage")
    target = target if isinstance(target, ManifestStage) else ManifestStage(*target)
    stages = sources + [target]
    names = [s.name for s in stages]
    if len(set(names)) != len(names):
        raise RecastError(f"duplicate stage names in manifest: {names}")
    return MultiSourceManifest(stages)


def save_manifest(manifest: MultiSourceManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_pretty(manifest.to_record()))


def load_manifest(path) -> MultiSourceManifest:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RecastError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(record, dict) or not isinstance(record.get("stages"), list):
        raise RecastError(f"{path}: manifest must be an object with a 'stages' list")
    try:
        stages = [ManifestStage(s["name"], s["path"], int(s.get("epochs", 25)))
                  for s in record["stages"]]
    except (KeyError, TypeError) as exc:
        raise RecastError(f"{path}: malformed manifest ({exc})") from exc
    names = [s.name for s in stages]
    if len(set(names)) != len(names):
        raise RecastError(f"{path}: duplicate stage names")
    return MultiSourceManifest(stages)
