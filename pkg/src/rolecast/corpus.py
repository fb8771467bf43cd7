"""Neutral data model and ingestion for event-argument corpora.

A :class:`Document` carries raw text plus character-offset annotations:
sentence boundaries, typed entity mentions, and event mentions with their
role arguments. Offsets are 0-based, end-exclusive, over Unicode code
points. Everything downstream (candidate generation, verbalization,
recasting, evaluation) consumes this representation, so ACE-like or
WikiEvents-like corpora only need a one-off conversion into the native
line-delimited format (see README for the record schema and conversion
recipes; the converters themselves are not shipped because the source
corpora are licensed).

Candidate generation is sentence-level: an entity mention is considered
for an event only when it lies in the same sentence as the trigger. Gold
arguments whose mention sits outside the trigger sentence produce no
candidate; they are reported by :func:`unreachable_arguments` and charged
as recall errors by the evaluation module.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass

from .errors import RolecastError
from .ioutil import dumps_canonical

# Distinguished non-role label: the candidate takes no part in the event.
# Never a valid role name.
NEGATIVE = "[NEGATIVE]"


class CorpusError(RolecastError, ValueError):
    pass


class CorpusFormatError(CorpusError):
    """A file could not be parsed as the native corpus format."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DocumentInvariantError(CorpusError):
    """A document violates a structural invariant."""

    def __init__(self, document_id: str, field_name: str, message: str):
        super().__init__(f"document {document_id!r}, {field_name}: {message}")
        self.document_id = document_id
        self.field_name = field_name


@dataclass(frozen=True)
class EntityMention:
    id: str
    start: int
    end: int
    surface: str
    entity_type: str


@dataclass(frozen=True)
class EventMention:
    id: str
    trigger_start: int
    trigger_end: int
    trigger_surface: str
    event_type: str      # coarse, e.g. Movement
    event_subtype: str   # fine, e.g. Transport
    arguments: tuple[tuple[str, str], ...] = ()  # (entity_id, role)


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    sentences: tuple[tuple[int, int], ...]
    entities: tuple[EntityMention, ...] = ()
    events: tuple[EventMention, ...] = ()
    coref_chains: tuple[frozenset[str], ...] = ()

    def entity_by_id(self, entity_id: str) -> EntityMention:
        for ent in self.entities:
            if ent.id == entity_id:
                return ent
        raise CorpusError(f"document {self.id!r} has no entity {entity_id!r}")

    def event_by_id(self, event_id: str) -> EventMention:
        for event in self.events:
            if event.id == event_id:
                return event
        raise CorpusError(f"document {self.id!r} has no event {event_id!r}")

    def sentence_index_at(self, offset: int) -> int | None:
        """Index of the sentence whose range contains `offset`, if any."""
        for i, (start, end) in enumerate(self.sentences):
            if start <= offset < end:
                return i
        return None

    def sentence_text(self, index: int) -> str:
        start, end = self.sentences[index]
        return self.text[start:end]

    def trigger_sentence_index(self, event: EventMention) -> int | None:
        return self.sentence_index_at(event.trigger_start)

    def chain_of(self, entity_id: str) -> frozenset[str]:
        """Coreference chain of a mention; singleton when unchained."""
        members = {entity_id}
        for chain in self.coref_chains:
            if entity_id in chain:
                members |= chain
        return frozenset(members)

    def validate(self) -> None:
        """Raise DocumentInvariantError on the first violated invariant."""
        n = len(self.text)

        prev_end = 0
        for i, (start, end) in enumerate(self.sentences):
            if not (0 <= start < end <= n):
                raise DocumentInvariantError(
                    self.id, f"sentences[{i}]", f"range ({start}, {end}) outside text bounds [0, {n})"
                )
            if start < prev_end:
                raise DocumentInvariantError(
                    self.id, f"sentences[{i}]", "sentence ranges overlap or are unsorted"
                )
            prev_end = end

        seen_entities: set[str] = set()
        for ent in self.entities:
            where = f"entities[{ent.id!r}]"
            if ent.id in seen_entities:
                raise DocumentInvariantError(self.id, where, "duplicate entity id")
            seen_entities.add(ent.id)
            if not (0 <= ent.start < ent.end <= n):
                raise DocumentInvariantError(self.id, where, f"span ({ent.start}, {ent.end}) outside text")
            if ent.surface != self.text[ent.start:ent.end]:
                raise DocumentInvariantError(
                    self.id, where,
                    f"surface {ent.surface!r} != text slice {self.text[ent.start:ent.end]!r}",
                )
            if not ent.entity_type:
                raise DocumentInvariantError(self.id, where, "empty entity_type")
            inside = [
                i for i, (s, e) in enumerate(self.sentences)
                if s <= ent.start and ent.end <= e
            ]
            if len(inside) != 1:
                raise DocumentInvariantError(
                    self.id, where, "mention does not lie inside exactly one sentence range"
                )

        seen_events: set[str] = set()
        for event in self.events:
            where = f"events[{event.id!r}]"
            if event.id in seen_events:
                raise DocumentInvariantError(self.id, where, "duplicate event id")
            seen_events.add(event.id)
            if not (0 <= event.trigger_start < event.trigger_end <= n):
                raise DocumentInvariantError(self.id, where, "trigger span outside text")
            if event.trigger_surface != self.text[event.trigger_start:event.trigger_end]:
                raise DocumentInvariantError(self.id, where, "trigger surface != text slice")
            if not event.event_type or not event.event_subtype:
                raise DocumentInvariantError(self.id, where, "empty event type or subtype")
            seen_args: set[tuple[str, str]] = set()
            for entity_id, role in event.arguments:
                if entity_id not in seen_entities:
                    raise DocumentInvariantError(
                        self.id, where, f"argument references unknown entity {entity_id!r}"
                    )
                if not role or role == NEGATIVE:
                    raise DocumentInvariantError(self.id, where, f"invalid role label {role!r}")
                if (entity_id, role) in seen_args:
                    raise DocumentInvariantError(
                        self.id, where, f"duplicate argument ({entity_id!r}, {role!r})"
                    )
                seen_args.add((entity_id, role))

        for i, chain in enumerate(self.coref_chains):
            for entity_id in chain:
                if entity_id not in seen_entities:
                    raise DocumentInvariantError(
                        self.id, f"coref_chains[{i}]", f"unknown entity {entity_id!r}"
                    )


@dataclass(frozen=True)
class Candidate:
    """One (event, entity-mention) decision unit.

    gold_role is a role label, or NEGATIVE when the mention takes no part
    in the event.
    """

    document_id: str
    event_id: str
    entity_id: str
    gold_role: str = NEGATIVE

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.document_id, self.event_id, self.entity_id)

    @property
    def is_positive(self) -> bool:
        return self.gold_role != NEGATIVE


# ---------------------------------------------------------------------------
# Native line-delimited format

def document_to_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "text": doc.text,
        "sentences": [[s, e] for s, e in doc.sentences],
        "entities": [
            {"id": ent.id, "start": ent.start, "end": ent.end, "type": ent.entity_type}
            for ent in doc.entities
        ],
        "events": [
            {
                "id": event.id,
                "trigger": {"start": event.trigger_start, "end": event.trigger_end},
                "type": event.event_type,
                "subtype": event.event_subtype,
                "arguments": [
                    {"entity_id": entity_id, "role": role}
                    for entity_id, role in event.arguments
                ],
            }
            for event in doc.events
        ],
        "coref": sorted(sorted(chain) for chain in doc.coref_chains),
    }


def document_from_record(record: dict) -> Document:
    try:
        text = record["text"]
        doc = Document(
            id=record["id"],
            text=text,
            sentences=tuple((int(s), int(e)) for s, e in record["sentences"]),
            entities=tuple(
                EntityMention(
                    id=ent["id"],
                    start=int(ent["start"]),
                    end=int(ent["end"]),
                    # surface is derived from the span; an explicit field is
                    # accepted and checked against the text by validate()
                    surface=ent.get("surface", text[int(ent["start"]):int(ent["end"])]),
                    entity_type=ent["type"],
                )
                for ent in record.get("entities", [])
            ),
            events=tuple(
                EventMention(
                    id=event["id"],
                    trigger_start=int(event["trigger"]["start"]),
                    trigger_end=int(event["trigger"]["end"]),
                    trigger_surface=text[int(event["trigger"]["start"]):int(event["trigger"]["end"])],
                    event_type=event["type"],
                    event_subtype=event["subtype"],
                    arguments=tuple(
                        (arg["entity_id"], arg["role"])
                        for arg in event.get("arguments", [])
                    ),
                )
                for event in record.get("events", [])
            ),
            coref_chains=tuple(frozenset(chain) for chain in record.get("coref", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusFormatError(f"malformed document record: {exc}") from exc
    return doc


def load_corpus(path, format: str = "native") -> list[Document]:
    """Load a corpus file: one JSON document record per line.

    Loading is order-preserving and validates every document invariant.
    """
    if format != "native":
        raise CorpusFormatError(f"unknown corpus format {format!r}")
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(str(exc), line=lineno) from exc
            try:
                doc = document_from_record(record)
                doc.validate()
            except CorpusError as exc:
                raise CorpusFormatError(str(exc), line=lineno) from exc
            docs.append(doc)
    return docs


def save_corpus(docs, path) -> None:
    """Write documents in canonical form; save(load(x)) is byte-stable."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(dumps_canonical(document_to_record(doc)))
            fh.write("\n")


# ---------------------------------------------------------------------------
# Candidate generation (sentence-level)

def generate_candidates(doc: Document) -> list[Candidate]:
    """One candidate per (event, same-sentence entity mention) pair.

    gold_role comes from the event's argument list (first listed role when
    a mention fills several roles of one event), else NEGATIVE. Events
    whose trigger lies outside every sentence yield no candidates.
    """
    out = []
    for event in doc.events:
        sidx = doc.trigger_sentence_index(event)
        if sidx is None:
            continue
        s_start, s_end = doc.sentences[sidx]
        gold: dict[str, str] = {}
        for entity_id, role in event.arguments:
            gold.setdefault(entity_id, role)
        for ent in doc.entities:
            if s_start <= ent.start and ent.end <= s_end:
                out.append(Candidate(doc.id, event.id, ent.id, gold.get(ent.id, NEGATIVE)))
    return out


def unreachable_arguments(doc: Document) -> list[Candidate]:
    """Gold arguments that candidate generation cannot reach.

    Covers mentions outside the trigger sentence, events with no trigger
    sentence, and second roles of a mention that already carries one.
    Returned as Candidate records (gold_role = the missed role) so the
    evaluation module can charge them as false negatives.
    """
    reachable = {(c.event_id, c.entity_id): c.gold_role for c in generate_candidates(doc)}
    missed = []
    for event in doc.events:
        for entity_id, role in event.arguments:
            if reachable.get((event.id, entity_id)) != role:
                missed.append(Candidate(doc.id, event.id, entity_id, role))
    return missed


# ---------------------------------------------------------------------------
# Few-shot splits

@dataclass(frozen=True)
class SplitSpec:
    """Fractions in (0, 1], sorted ascending and unique, plus a seed."""

    fractions: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        if not self.fractions:
            raise CorpusError("SplitSpec needs at least one fraction")
        for f in self.fractions:
            if not 0.0 < f <= 1.0:
                raise CorpusError(f"fraction {f} outside (0, 1]")
        if list(self.fractions) != sorted(set(self.fractions)):
            raise CorpusError("fractions must be sorted ascending and unique")


def make_splits(candidates, spec: SplitSpec) -> dict[float, list[Candidate]]:
    """Nested per-fraction subsets, sampled at event-mention granularity.

    All candidates of an event move together. Subsets are prefixes of one
    seeded shuffle of the event keys, so split(f1) is a subset of
    split(f2) whenever f1 <= f2, for every seed. Fraction 1.0 returns
    everything.
    """
    candidates = list(candidates)
    event_keys = []
    seen = set()
    for c in candidates:
        key = (c.document_id, c.event_id)
        if key not in seen:
            seen.add(key)
            event_keys.append(key)
    order = sorted(event_keys)
    random.Random(spec.seed).shuffle(order)

    result: dict[float, list[Candidate]] = {}
    for fraction in spec.fractions:
        if fraction == 1.0:
            k = len(order)
        else:
            k = round(fraction * len(order))
        if k == 0 and candidates:
            warnings.warn(f"fraction {fraction} selects zero events", stacklevel=2)
        chosen = set(order[:k])
        result[fraction] = [c for c in candidates if (c.document_id, c.event_id) in chosen]
    return result


@dataclass(frozen=True)
class SplitStats:
    total: int
    per_role_positive: dict[str, int]
    mean_positives_per_role: float


def split_stats(subset, roles=None) -> SplitStats:
    """Per-role positive counts, their mean, and the total example count.

    `roles` is the full role schema; roles with zero positives still count
    in the mean. Defaults to the roles observed in the subset.

    Reference scale from the source task (documentation, not a test): an
    ACE 5% split holds ~843 total examples at ~11.36 positives per role.
    """
    subset = list(subset)
    counts: dict[str, int] = {}
    for c in subset:
        if c.is_positive:
            counts[c.gold_role] = counts.get(c.gold_role, 0) + 1
    schema = sorted(roles) if roles is not None else sorted(counts)
    per_role = {role: counts.get(role, 0) for role in schema}
    unknown = sorted(set(counts) - set(schema))
    if unknown:
        raise CorpusError(f"positives with roles outside the schema: {unknown}")
    mean = sum(per_role.values()) / len(per_role) if per_role else 0.0
    return SplitStats(total=len(subset), per_role_positive=per_role, mean_positives_per_role=mean)
