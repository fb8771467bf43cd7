import json
import random
import warnings

import pytest

from rolecast import synthetic
from rolecast.corpus import (
    NEGATIVE,
    Candidate,
    CorpusFormatError,
    Document,
    DocumentInvariantError,
    EntityMention,
    EventMention,
    SplitSpec,
    generate_candidates,
    load_corpus,
    make_splits,
    save_corpus,
    split_stats,
    unreachable_arguments,
)


# --- independent oracles -----------------------------------------------------

def oracle_candidates(doc):
    """O(n^2) enumeration with its own sentence-membership logic."""
    def sentence_of(start, end):
        hits = [i for i, (s, e) in enumerate(doc.sentences) if s <= start and end <= e]
        return hits[0] if len(hits) == 1 else None

    def sentence_of_point(offset):
        hits = [i for i, (s, e) in enumerate(doc.sentences) if s <= offset < e]
        return hits[0] if hits else None

    expected = set()
    for event in doc.events:
        trigger_sentence = sentence_of_point(event.trigger_start)
        if trigger_sentence is None:
            continue
        gold = {}
        for entity_id, role in event.arguments:
            if entity_id not in gold:
                gold[entity_id] = role
        for ent in doc.entities:
            if sentence_of(ent.start, ent.end) == trigger_sentence:
                expected.add((event.id, ent.id, gold.get(ent.id, NEGATIVE)))
    return expected


def recount_positives(subset):
    counts = {}
    total = 0
    for c in subset:
        total += 1
        if c.gold_role != NEGATIVE:
            counts[c.gold_role] = counts.get(c.gold_role, 0) + 1
    return total, counts


# --- fixtures ----------------------------------------------------------------

def two_sentence_doc():
    #          0         1         2         3
    #          0123456789012345678901234567890123456789
    text = "Ana met Bob here. Carol stayed home."
    return Document(
        id="doc1",
        text=text,
        sentences=((0, 17), (18, 36)),
        entities=(
            EntityMention("e1", 0, 3, "Ana", "PER"),
            EntityMention("e2", 8, 11, "Bob", "PER"),
            EntityMention("e3", 18, 23, "Carol", "PER"),
        ),
        events=(
            EventMention("ev1", 4, 7, "met", "Contact", "Contact.Meet",
                         arguments=(("e1", "Entity"),)),
        ),
        coref_chains=(frozenset({"e1", "e3"}),),
    )


# --- loading & validation ----------------------------------------------------

def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert load_corpus(path) == []


def test_load_unknown_format_rejected(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(CorpusFormatError):
        load_corpus(path, format="xml")


def test_load_round_trip_is_byte_stable(tmp_path):
    world = synthetic.make_world(seed=3)
    docs = synthetic.random_corpus(world, 3, seed=5)
    docs[0] = Document(
        id=docs[0].id, text=docs[0].text, sentences=docs[0].sentences,
        entities=docs[0].entities, events=docs[0].events,
        coref_chains=(frozenset({docs[0].entities[0].id}),),
    )
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    save_corpus(docs, first)
    loaded = load_corpus(first)
    save_corpus(loaded, second)
    assert first.read_bytes() == second.read_bytes()
    assert loaded == load_corpus(second)


def test_load_reports_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "d1"}\nnot json\n')
    with pytest.raises(CorpusFormatError) as err:
        load_corpus(path)
    assert "line 1" in str(err.value) or "line 2" in str(err.value)


def test_load_entity_surface_mismatch_names_entity(tmp_path):
    record = {
        "id": "d1",
        "text": "Ana met Bob.",
        "sentences": [[0, 12]],
        "entities": [{"id": "e9", "start": 0, "end": 3, "type": "PER", "surface": "Bob"}],
        "events": [],
        "coref": [],
    }
    path = tmp_path / "corpus.jsonl"
    path.write_text(json.dumps(record) + "\n")
    with pytest.raises(CorpusFormatError) as err:
        load_corpus(path)
    assert "e9" in str(err.value)


def test_unicode_offsets_are_code_points(tmp_path):
    # "José" (with a combining-free é) and an emoji: offsets count code
    # points, not bytes, so spans line up after a save/load round trip.
    text = "José 🚀 met Ana."
    doc = Document(
        id="u1",
        text=text,
        sentences=((0, len(text)),),
        entities=(
            EntityMention("e1", 0, 4, "José", "PER"),
            EntityMention("e2", 11, 14, "Ana", "PER"),
        ),
        events=(EventMention("ev", 7, 10, "met", "Contact", "Contact.Meet",
                             arguments=(("e1", "Entity"),)),),
    )
    doc.validate()
    path = tmp_path / "unicode.jsonl"
    save_corpus([doc], path)
    loaded = load_corpus(path)
    assert loaded == [doc]
    assert {(c.entity_id, c.gold_role) for c in generate_candidates(loaded[0])} == {
        ("e1", "Entity"), ("e2", NEGATIVE),
    }


def test_validate_rejects_overlapping_sentences():
    doc = Document(id="d", text="abcdef", sentences=((0, 4), (3, 6)))
    with pytest.raises(DocumentInvariantError) as err:
        doc.validate()
    assert err.value.document_id == "d"


def test_validate_rejects_unknown_argument_entity():
    doc = Document(
        id="d", text="Ana met Bob.", sentences=((0, 12),),
        entities=(EntityMention("e1", 0, 3, "Ana", "PER"),),
        events=(EventMention("ev", 4, 7, "met", "Contact", "Contact.Meet",
                             arguments=(("ghost", "Entity"),)),),
    )
    with pytest.raises(DocumentInvariantError) as err:
        doc.validate()
    assert "ghost" in str(err.value)


def test_validate_rejects_entity_crossing_sentences():
    doc = Document(
        id="d", text="Ana met. Bob sat.", sentences=((0, 8), (9, 17)),
        entities=(EntityMention("e1", 4, 12, "met. Bob", "PER"),),
    )
    with pytest.raises(DocumentInvariantError):
        doc.validate()


# --- candidate generation ----------------------------------------------------

def test_candidates_same_sentence_rule():
    doc = two_sentence_doc()
    candidates = generate_candidates(doc)
    assert {(c.event_id, c.entity_id, c.gold_role) for c in candidates} == {
        ("ev1", "e1", "Entity"),
        ("ev1", "e2", NEGATIVE),
    }
    # e3 sits in the other sentence: not a candidate.
    assert all(c.entity_id != "e3" for c in candidates)


def test_unreachable_arguments_cross_sentence():
    base = two_sentence_doc()
    doc = Document(
        id=base.id, text=base.text, sentences=base.sentences, entities=base.entities,
        events=(EventMention("ev1", 4, 7, "met", "Contact", "Contact.Meet",
                             arguments=(("e1", "Entity"), ("e3", "Entity"))),),
    )
    doc.validate()
    candidates = generate_candidates(doc)
    assert ("ev1", "e3") not in {(c.event_id, c.entity_id) for c in candidates}
    missed = unreachable_arguments(doc)
    assert [(m.event_id, m.entity_id, m.gold_role) for m in missed] == [("ev1", "e3", "Entity")]


def test_candidates_match_enumeration_oracle():
    rng = random.Random(99)
    for trial in range(200):
        world = synthetic.make_world(seed=rng.randint(0, 10**6))
        doc = synthetic.random_document(
            world, f"t{trial}", rng,
            n_sentences=rng.randint(1, 4), max_entities=rng.randint(1, 5),
        )
        assert len(doc.entities) <= 20
        got = {(c.event_id, c.entity_id, c.gold_role) for c in generate_candidates(doc)}
        assert got == oracle_candidates(doc)


def test_candidate_count_equals_per_sentence_totals(docs):
    for doc in docs:
        per_event = []
        for event in doc.events:
            sidx = doc.trigger_sentence_index(event)
            start, end = doc.sentences[sidx]
            per_event.append(sum(1 for e in doc.entities if start <= e.start and e.end <= end))
        assert len(generate_candidates(doc)) == sum(per_event)


# --- splits ------------------------------------------------------------------

def all_candidates(docs):
    return [c for doc in docs for c in generate_candidates(doc)]


def test_split_full_fraction_is_identity(docs):
    candidates = all_candidates(docs)
    splits = make_splits(candidates, SplitSpec(fractions=(1.0,), seed=4))
    assert splits[1.0] == candidates


def test_split_determinism_and_seed_sensitivity(docs):
    candidates = all_candidates(docs)
    spec = SplitSpec(fractions=(0.25, 0.5), seed=13)
    again = SplitSpec(fractions=(0.25, 0.5), seed=13)
    assert make_splits(candidates, spec) == make_splits(candidates, again)
    other = make_splits(candidates, SplitSpec(fractions=(0.25, 0.5), seed=14))
    assert other != make_splits(candidates, spec)


def test_split_nestedness_over_random_corpora():
    rng = random.Random(7)
    fractions = (0.01, 0.05, 0.1, 0.2, 1.0)
    for trial in range(200):
        world = synthetic.make_world(seed=rng.randint(0, 10**6))
        docs = synthetic.random_corpus(world, rng.randint(1, 6), seed=rng.randint(0, 10**6))
        candidates = all_candidates(docs)
        if not candidates:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # tiny corpora hit the zero-selection warning
            splits = make_splits(candidates, SplitSpec(fractions=fractions, seed=rng.randint(0, 10**6)))
        for small, large in zip(fractions, fractions[1:]):
            small_keys = {c.key for c in splits[small]}
            large_keys = {c.key for c in splits[large]}
            assert small_keys <= large_keys
        assert splits[1.0] == candidates


def test_split_events_move_together(docs):
    candidates = all_candidates(docs)
    splits = make_splits(candidates, SplitSpec(fractions=(0.5,), seed=2))
    chosen_events = {(c.document_id, c.event_id) for c in splits[0.5]}
    for c in candidates:
        if (c.document_id, c.event_id) in chosen_events:
            assert c in splits[0.5]


def test_split_zero_selection_warns():
    candidates = [Candidate("d", "ev", "e", NEGATIVE)]
    with pytest.warns(UserWarning):
        splits = make_splits(candidates, SplitSpec(fractions=(0.01,), seed=0))
    assert splits[0.01] == []


def test_split_spec_validation():
    with pytest.raises(Exception):
        SplitSpec(fractions=(0.5, 0.1))
    with pytest.raises(Exception):
        SplitSpec(fractions=(0.0,))
    with pytest.raises(Exception):
        SplitSpec(fractions=(1.5,))


# --- split stats ---------------------------------------------------------------

def test_stats_empty_subset():
    stats = split_stats([], roles=["A", "B"])
    assert stats.total == 0
    assert stats.per_role_positive == {"A": 0, "B": 0}
    assert stats.mean_positives_per_role == 0.0


def test_stats_mean_is_arithmetic():
    subset = (
        [Candidate("d", "ev1", f"e{i}", "RoleA") for i in range(3)]
        + [Candidate("d", "ev1", "e9", "RoleB")]
    )
    stats = split_stats(subset)
    assert stats.per_role_positive == {"RoleA": 3, "RoleB": 1}
    assert stats.mean_positives_per_role == 2.0


def test_stats_schema_roles_count_as_zero():
    subset = [Candidate("d", "ev", "e", "RoleA")]
    stats = split_stats(subset, roles=["RoleA", "RoleB", "RoleC", "RoleD"])
    assert stats.mean_positives_per_role == 0.25


def test_stats_match_recount(docs):
    candidates = all_candidates(docs)
    stats = split_stats(candidates)
    total, counts = recount_positives(candidates)
    assert stats.total == total
    assert stats.per_role_positive == counts
