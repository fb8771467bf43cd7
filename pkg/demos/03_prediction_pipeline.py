"""The full decision pipeline on one sentence:
verbalize -> score -> constraint-filter -> argmax -> threshold.

A scripted lookup oracle stands in for a real NLI model (any scorer behind
the wire protocol plugs in the same way). Run:
python demos/03_prediction_pipeline.py
"""

from rolecast.constraints import shipped_constraints
from rolecast.corpus import Candidate, Document, EntityMention, EventMention
from rolecast.entailment import EntailmentJudgment, LookupBackend, Scorer
from rolecast.inference import InferenceConfig, predict_role
from rolecast.templates import shipped_library

CONTEXT = "John D. Idol was hired as the company's new chief executive."


def build_document():
    org_start = CONTEXT.index("company")
    trg_start = CONTEXT.index("hired")
    doc = Document(
        id="demo",
        text=CONTEXT,
        sentences=((0, len(CONTEXT)),),
        entities=(
            EntityMention("arg", 0, 12, "John D. Idol", "PER"),
            EntityMention("org", org_start, org_start + 7, "company", "ORG"),
        ),
        events=(EventMention("ev", trg_start, trg_start + 5, "hired", "Personnel",
                             "Personnel.Start-Position"),),
    )
    doc.validate()
    return doc


def main():
    doc = build_document()
    library = shipped_library("main")
    table = shipped_constraints("ace")

    # The oracle scripts one hypothesis as entailed; unknown pairs fall back
    # to pure neutral, so nothing else can clear the threshold.
    oracle = LookupBackend({
        (CONTEXT, "John D. Idol was hired."): EntailmentJudgment(0.95, 0.04, 0.01),
    })
    scorer = Scorer(oracle)

    person = Candidate("demo", "ev", "arg", "Person")
    pred = predict_role(person, doc, library, table, scorer, InferenceConfig(threshold=0.5))
    print(f"candidate 'John D. Idol' (PER): predicted={pred.predicted} "
          f"score={pred.winning_role_score}")
    for s in pred.scores:
        print(f"  {s.role:>8} [{s.template_id}] entail={s.entail}")

    # The ORG mention can only fill Entity for this event subtype; its
    # hypothesis is unscripted (neutral), so the threshold sends it negative.
    org = Candidate("demo", "ev", "org", "[NEGATIVE]")
    pred = predict_role(org, doc, library, table, scorer)
    print(f"candidate 'company' (ORG): predicted={pred.predicted} "
          f"(considered roles: {sorted({s.role for s in pred.scores})})")


if __name__ == "__main__":
    main()
