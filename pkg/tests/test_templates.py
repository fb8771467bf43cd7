import random
import string

import pytest

from rolecast.templates import (
    CATEGORIES,
    PLACEHOLDER_NAMES,
    EventContext,
    LibraryMetadata,
    Template,
    TemplateError,
    TemplateLibrary,
    library_from_record,
    library_to_record,
    load_library,
    parse_template,
    save_library,
    shipped_library,
    verbalize,
    verbalize_role_set,
)

HIRE_CTX = EventContext(trigger_surface="hired", event_type="Personnel",
                        event_subtype="Personnel.Start-Position")


# --- parsing -----------------------------------------------------------------

def test_parse_implicit_template():
    t = parse_template("The victim was {arg}.", "Victim", "implicit-arg")
    assert t.category == "implicit-arg"
    assert t.placeholders == ("arg",)


def test_parse_explicit_template():
    t = parse_template("The {trg} occurred in {arg}.", "Place", "explicit-trg")
    assert t.placeholders == ("trg", "arg")


def test_parse_missing_arg():
    with pytest.raises(TemplateError, match="missing"):
        parse_template("Someone did something.", "Agent", "implicit-arg")


def test_parse_duplicate_arg():
    with pytest.raises(TemplateError, match="2 times"):
        parse_template("{arg} saw {arg}.", "Agent", "implicit-arg")


def test_parse_unknown_placeholder():
    with pytest.raises(TemplateError, match="unknown placeholder"):
        parse_template("{arg} did {verb}.", "Agent", "implicit-arg")


def test_parse_canonical_category_requires_placeholder():
    with pytest.raises(TemplateError, match="canonical_trg"):
        parse_template("{arg} was jailed.", "Person", "canonical-trg")


def test_parse_canonical_requires_scope():
    with pytest.raises(TemplateError, match="scope"):
        parse_template("{arg} was {canonical_trg}.", "Person", "canonical-trg")


def test_parse_unknown_category():
    with pytest.raises(TemplateError, match="category"):
        parse_template("{arg}.", "Agent", "freestyle")


def test_parse_generated_ids_are_stable():
    a = parse_template("{arg} won.", "Winner", "implicit-arg")
    b = parse_template("{arg} won.", "Winner", "implicit-arg")
    assert a.id == b.id


# --- verbalization -----------------------------------------------------------

def test_verbalize_person_hired():
    t = parse_template("{arg} was {trg}.", "Person", "explicit-trg")
    assert verbalize(t, HIRE_CTX, "John D. Idol") == "John D. Idol was hired."


def test_verbalize_is_purely_mechanical():
    t = parse_template("The {trg} occurred in {arg}.", "Place", "explicit-trg")
    assert verbalize(t, HIRE_CTX, "John D. Idol") == "The hired occurred in John D. Idol."


def test_verbalize_subtype_placeholder():
    t = parse_template("Someone {trg_subtype} to {arg}.", "Destination", "explicit-trg")
    ctx = EventContext("moved", "Movement", "Transport")
    assert verbalize(t, ctx, "Baghdad") == "Someone Transport to Baghdad."


def test_verbalize_canonical_lookup():
    t = parse_template("{arg} was {canonical_trg}.", "Person", "canonical-trg",
                       scope=["Justice.Arrest-Jail"])
    ctx = EventContext("nabbed", "Justice", "Justice.Arrest-Jail")
    out = verbalize(t, ctx, "Bob", {"Justice.Arrest-Jail": "jailed"})
    assert out == "Bob was jailed."


def test_verbalize_missing_canonical_mapping():
    t = parse_template("{arg} was {canonical_trg}.", "Person", "canonical-trg",
                       scope=["Justice.Arrest-Jail"])
    ctx = EventContext("nabbed", "Justice", "Justice.Arrest-Jail")
    with pytest.raises(TemplateError, match="canonical"):
        verbalize(t, ctx, "Bob", {})


def test_verbalize_does_not_reexpand_substituted_text():
    t = parse_template("{arg} was {trg}.", "Person", "explicit-trg")
    out = verbalize(t, HIRE_CTX, "{trg}")
    assert out == "{trg} was hired."


def test_verbalize_properties_over_random_templates():
    rng = random.Random(5)
    for _ in range(300):
        words = ["".join(rng.choices(string.ascii_lowercase, k=4)) for _ in range(rng.randint(1, 6))]
        slots = ["{arg}"] + rng.sample(["{trg}", "{trg_type}", "{trg_subtype}"],
                                       rng.randint(0, 3))
        tokens = words + slots
        rng.shuffle(tokens)
        pattern = " ".join(tokens)
        t = parse_template(pattern, "R", "implicit-arg")
        arg = "ARG" + "".join(rng.choices(string.digits, k=6))
        ctx = EventContext("TRGSURF", "TYPEX", "SUBTYPEX")
        out = verbalize(t, ctx, arg)
        assert out.count(arg) == 1
        for name in PLACEHOLDER_NAMES:
            assert ("{%s}" % name) not in out
        bound = len(pattern) + len(arg) + len("TRGSURF") + len("TYPEX") + len("SUBTYPEX")
        assert len(out) <= bound
        assert out == verbalize(t, ctx, arg)


# --- role sets ---------------------------------------------------------------

def small_library():
    return TemplateLibrary(
        templates={
            "Person": [
                parse_template("{arg} was {trg}.", "Person", "explicit-trg", template_id="p1"),
                parse_template("{arg} is a person.", "Person", "implicit-arg", template_id="p2"),
            ],
            "Place": [
                parse_template("{trg} occurred in {arg}.", "Place", "explicit-trg", template_id="l1"),
            ],
            "Scoped": [
                parse_template("{arg} only for meetings.", "Scoped", "implicit-arg",
                               scope=["Contact.Meet"], template_id="s1"),
            ],
        },
    )


def test_verbalize_role_set_empty_roles():
    assert verbalize_role_set(small_library(), HIRE_CTX, "Bob", set()) == []


def test_verbalize_role_set_counts_and_order():
    rows = verbalize_role_set(small_library(), HIRE_CTX, "Bob", {"Person", "Place"})
    assert [(r[0], r[1]) for r in rows] == [("Person", "p1"), ("Person", "p2"), ("Place", "l1")]
    assert rows[0][2] == "Bob was hired."


def test_verbalize_role_set_scope_exclusion():
    rows = verbalize_role_set(small_library(), HIRE_CTX, "Bob", {"Scoped"})
    assert rows == []
    meet_ctx = EventContext("met", "Contact", "Contact.Meet")
    rows = verbalize_role_set(small_library(), meet_ctx, "Bob", {"Scoped"})
    assert [(r[0], r[1]) for r in rows] == [("Scoped", "s1")]


def test_verbalize_role_set_unknown_role():
    with pytest.raises(TemplateError, match="Ghost"):
        verbalize_role_set(small_library(), HIRE_CTX, "Bob", {"Person", "Ghost"})


# --- libraries ---------------------------------------------------------------

def test_library_validate_rejects_empty_role():
    library = TemplateLibrary(templates={"Person": []})
    with pytest.raises(TemplateError, match="empty template list"):
        library.validate()


def test_library_validate_rejects_duplicate_ids():
    t = parse_template("{arg} a.", "Person", "implicit-arg", template_id="x")
    u = parse_template("{arg} b.", "Person", "implicit-arg", template_id="x")
    with pytest.raises(TemplateError, match="duplicate"):
        TemplateLibrary(templates={"Person": [t, u]}).validate()


def test_library_canonical_scope_needs_map():
    record = {
        "roles": {
            "Person": [{
                "id": "p1", "pattern": "{arg} was {canonical_trg}.",
                "category": "canonical-trg", "scope": ["Justice.Arrest-Jail"],
            }],
        },
        "canonical_map": {},
        "metadata": {},
    }
    with pytest.raises(TemplateError, match="canonical_map"):
        library_from_record(record)


def test_library_round_trip_bytes(tmp_path):
    library = shipped_library("main")
    first = tmp_path / "lib1.json"
    second = tmp_path / "lib2.json"
    save_library(library, first)
    save_library(load_library(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_shipped_libraries_have_22_roles():
    for name in ("main", "linguist"):
        library = shipped_library(name)
        assert len(library.roles) == 22
        library.validate()


def test_shipped_main_covers_figure_example():
    library = shipped_library("main")
    rows = verbalize_role_set(library, HIRE_CTX, "John D. Idol", {"Person"})
    assert ("Person", "person-01", "John D. Idol was hired.") in rows


def test_shipped_linguist_canonical_machinery():
    library = shipped_library("linguist")
    ctx = EventContext("nabbed", "Justice", "Justice.Arrest-Jail")
    rows = verbalize_role_set(library, ctx, "Bob", {"Person"})
    assert ("Person", "person-03", "Bob be jailed.") in rows


def test_library_metadata_round_trip(tmp_path):
    library = TemplateLibrary(
        templates={"A": [parse_template("{arg} x.", "A", "implicit-arg", template_id="a1")]},
        metadata=LibraryMetadata(developer="dev", created="2026-08-08T00:00:00Z",
                                 elapsed_seconds_per_role={"A": 312.5}),
    )
    path = tmp_path / "lib.json"
    save_library(library, path)
    loaded = load_library(path)
    assert loaded.metadata.developer == "dev"
    assert loaded.metadata.elapsed_seconds_per_role == {"A": 312.5}


def test_load_library_reports_location(tmp_path):
    record = library_to_record(small_library())
    record["roles"]["Person"][0]["pattern"] = "no placeholder here"
    path = tmp_path / "bad.json"
    import json

    path.write_text(json.dumps(record))
    with pytest.raises(TemplateError, match=r"roles\.Person\[0\]"):
        load_library(path)


def test_categories_constant_is_closed():
    assert set(CATEGORIES) == {
        "implicit-arg", "explicit-trg", "canonical-trg", "canonical-with-placeholder",
    }
    for name in ("main", "linguist"):
        for templates in shipped_library(name).templates.values():
            for t in templates:
                assert t.category in CATEGORIES
