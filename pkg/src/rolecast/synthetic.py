"""Seeded generators for synthetic corpora, schemas, and scripted oracles.

Real EAE corpora are licensed, so the runnable artifacts in this repo
(tests, demos, planted end-to-end checks) work on generated documents: a
small event schema, documents whose sentences each hold one trigger plus a
few uniquely named entity mentions, and gold arguments assigned under the
schema's type constraints. Surfaces are unique per mention, which makes
every verbalized hypothesis unique — a scripted lookup oracle can then
plant exact judgments for chosen candidates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .constraints import ConstraintTable, table_from_mapping
from .corpus import Candidate, Document, EntityMention, EventMention, generate_candidates
from .entailment import EntailmentJudgment, LookupBackend, Pair
from .inference import _candidate_plan
from .templates import LibraryMetadata, TemplateLibrary, parse_template


@dataclass
class SynthWorld:
    """A generated schema with its constraint table and template library."""

    table: ConstraintTable
    library: TemplateLibrary
    subtypes: list[str]
    roles: list[str]
    entity_types: list[str]


def make_world(n_subtypes: int = 4, n_roles: int = 5, n_entity_types: int = 4,
               templates_per_role: int = 2, seed: int = 0) -> SynthWorld:
    """Schema + constraints + library with every role reachable somewhere."""
    rng = random.Random(seed)
    roles = [f"Role{i}" for i in range(n_roles)]
    entity_types = [f"T{i}" for i in range(n_entity_types)]
    subtypes = [f"Domain.Ev{i}" for i in range(n_subtypes)]

    mapping: dict[str, dict[str, list[str]]] = {}
    for subtype in subtypes:
        k = rng.randint(2, n_roles)
        chosen = rng.sample(roles, k)
        grants = {}
        for role in chosen:
            t = rng.randint(1, max(1, n_entity_types - 1))
            grants[role] = sorted(rng.sample(entity_types, t))
        mapping[subtype] = grants
    # Every role must appear under at least one subtype.
    for role in roles:
        if not any(role in grants for grants in mapping.values()):
            mapping[subtypes[0]][role] = [entity_types[0]]
    table = table_from_mapping(mapping)

    templates = {}
    for role in roles:
        patterns = [f"{{arg}} held the {role} part of the {{trg}} happening."]
        if templates_per_role > 1:
            patterns.append(f"The {role} slot of this {{trg_subtype}} event was {{arg}}.")
        for extra in range(2, templates_per_role):
            patterns.append(f"{{arg}} is {role} answer number {extra}.")
        templates[role] = [
            parse_template(p, role, "explicit-trg", template_id=f"{role.lower()}-{i:02d}")
            for i, p in enumerate(patterns)
        ]
    library = TemplateLibrary(templates, {}, LibraryMetadata(developer="synthetic"))
    library.validate()
    return SynthWorld(table, library, subtypes, roles, entity_types)


def random_document(world: SynthWorld, doc_id: str, rng: random.Random,
                    n_sentences: int = 2, max_entities: int = 4,
                    positive_rate: float = 0.7) -> Document:
    """One document: a trigger and 1..max_entities mentions per sentence.

    Gold arguments are drawn among same-sentence mentions whose type the
    schema allows for a role of the event; each chosen mention gets exactly
    one role, so planted predictions can hit F1 = 1.0.
    """
    pieces = []
    offset = 0
    sentences = []
    entities = []
    events = []
    for s in range(n_sentences):
        subtype = rng.choice(world.subtypes)
        event_type = subtype.split(".")[0]
        trigger_word = f"trig{doc_id}x{s}"
        words = [f"w{s}a", trigger_word]
        entity_specs = []
        for k in range(rng.randint(1, max_entities)):
            surface = f"ent{doc_id}x{s}x{k}"
            entity_specs.append((surface, rng.choice(world.entity_types)))
            words.append(surface)
        words.append(f"w{s}b.")
        sentence = " ".join(words)
        start = offset
        pieces.append(sentence)
        offset += len(sentence)
        end = offset
        offset += 1  # joining space
        sentences.append((start, end))

        cursor = start
        trigger_span = None
        spans = {}
        for word in words:
            if word == trigger_word:
                trigger_span = (cursor, cursor + len(word))
            for surface, _ in entity_specs:
                if word == surface:
                    spans[surface] = (cursor, cursor + len(word))
            cursor += len(word) + 1

        event_id = f"{doc_id}-ev{s}"
        sentence_entities = []
        for k, (surface, entity_type) in enumerate(entity_specs):
            span = spans[surface]
            sentence_entities.append(EntityMention(
                id=f"{doc_id}-e{s}x{k}", start=span[0], end=span[1],
                surface=surface, entity_type=entity_type,
            ))
        entities.extend(sentence_entities)

        arguments = []
        roles_open = sorted(world.table.roles_of_event[subtype])
        for ent in sentence_entities:
            if rng.random() > positive_rate:
                continue
            legal = [r for r in roles_open
                     if ent.entity_type in world.table.allowed[(subtype, r)]]
            if legal:
                arguments.append((ent.id, rng.choice(legal)))
        events.append(EventMention(
            id=event_id, trigger_start=trigger_span[0], trigger_end=trigger_span[1],
            trigger_surface=trigger_word, event_type=event_type, event_subtype=subtype,
            arguments=tuple(arguments),
        ))

    doc = Document(
        id=doc_id, text=" ".join(pieces), sentences=tuple(sentences),
        entities=tuple(entities), events=tuple(events),
    )
    doc.validate()
    return doc


def random_corpus(world: SynthWorld, n_docs: int, seed: int = 0, **doc_kwargs) -> list[Document]:
    rng = random.Random(seed)
    return [random_document(world, f"d{i:03d}", rng, **doc_kwargs) for i in range(n_docs)]


def planted_oracle(docs, world: SynthWorld, entail: float = 0.9) -> tuple[dict[Pair, EntailmentJudgment], list[Candidate]]:
    """Scripted lookup entries that make every gold argument win.

    For each positive candidate, the hypothesis of its gold role's first
    applicable template scores (entail, ...); everything else falls to the
    oracle's pure-neutral default. Returns (table, positive candidates in
    corpus order).
    """
    judgment = EntailmentJudgment(entail, round(1 - entail - 0.02, 6), 0.02)
    table: dict[Pair, EntailmentJudgment] = {}
    positives = []
    for doc in docs:
        for candidate in generate_candidates(doc):
            if not candidate.is_positive:
                continue
            positives.append(candidate)
            premise, rows = _candidate_plan(candidate, doc, world.library, world.table)
            gold_rows = [row for row in rows if row[0] == candidate.gold_role]
            if not gold_rows:
                continue  # constraint-excluded gold; stays unreachable for planting
            _, _, hypothesis = gold_rows[0]
            table[(premise, hypothesis)] = judgment
    return table, positives


def planted_backend(docs, world: SynthWorld, entail: float = 0.9) -> LookupBackend:
    table, _ = planted_oracle(docs, world, entail)
    return LookupBackend(table)
