"""Template walkthrough: the four authoring styles and mechanical substitution.

Run: python demos/02_templates_and_verbalization.py
"""

from rolecast.templates import (
    EventContext,
    parse_template,
    shipped_library,
    verbalize,
    verbalize_role_set,
)


def main():
    ctx = EventContext(trigger_surface="hired", event_type="Personnel",
                       event_subtype="Personnel.Start-Position")

    # Implicit: says something about the argument without naming the event.
    t = parse_template("The victim was {arg}.", "Victim", "implicit-arg")
    print(verbalize(t, ctx, "John D. Idol"))

    # Explicit: mentions the trigger. Substitution is mechanical; nothing is
    # inflected, which deliberately produces clumsy text for bad role fits.
    t = parse_template("The {trg} occurred in {arg}.", "Place", "explicit-trg")
    print(verbalize(t, ctx, "John D. Idol"))

    # Canonical: a predefined trigger word per event subtype.
    t = parse_template("{arg} was {canonical_trg}.", "Person", "canonical-trg",
                       scope=["Justice.Arrest-Jail"])
    jailed_ctx = EventContext("nabbed", "Justice", "Justice.Arrest-Jail")
    print(verbalize(t, jailed_ctx, "the suspect", {"Justice.Arrest-Jail": "jailed"}))

    # Two full example libraries ship with the package (22 roles each, one
    # per developer style). Scope-restricted templates drop out for other
    # event subtypes automatically.
    for name in ("main", "linguist"):
        library = shipped_library(name)
        rows = verbalize_role_set(library, ctx, "John D. Idol", {"Person"})
        print(f"{name} library, Person hypotheses for a hiring event:")
        for role, template_id, hypothesis in rows:
            print(f"  [{template_id}] {hypothesis}")


if __name__ == "__main__":
    main()
