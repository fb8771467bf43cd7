"""Scoring walkthrough: micro F1, coref credit, recall diffs, and the
area under an F1-vs-training-fraction curve.

Run: python demos/05_metrics_and_auc.py
"""

from rolecast.corpus import NEGATIVE, Candidate
from rolecast.evaluation import auc, recall_diff, report, score_coref_f1, score_f1


def main():
    candidates = [
        Candidate("d", "ev", "e1", "Victim"),
        Candidate("d", "ev", "e2", "Place"),
        Candidate("d", "ev", "e3", NEGATIVE),
    ]
    predicted = ["Victim", NEGATIVE, "Attacker"]  # one hit, one miss, one spurious
    result = score_f1(candidates, predicted)
    print(f"P={result.precision:.2f} R={result.recall:.2f} F1={result.f1:.2f}")

    # Coref credit: predicting a chain-mate of the gold mention with the
    # right role counts as recovering the argument.
    chains = {("d", "e2"): frozenset({"e2", "e3"}), ("d", "e3"): frozenset({"e2", "e3"})}
    coref = score_coref_f1(candidates, ["Victim", NEGATIVE, "Place"], chains)
    print(f"coref-credited recall: {coref.recall:.2f} "
          f"(plain would be {score_f1(candidates, ['Victim', NEGATIVE, 'Place']).recall:.2f})")

    # Which roles does one template set recover that another misses?
    diffs = recall_diff(["Victim", "Place", NEGATIVE], ["Victim", NEGATIVE, NEGATIVE],
                        candidates)
    for role, diff in sorted(diffs.items()):
        tag = "same" if diff.same else f"a_only={diff.a_only:.2f} b_only={diff.b_only:.2f}"
        print(f"  {role}: {tag}")

    # AUC condenses a few-shot curve into one number: trapezoidal area over
    # the fraction axis, normalized by the axis span.
    curve = [(0, 40.6), (1, 45.4), (5, 57.1), (10, 64.6), (20, 69.8), (100, 74.6)]
    print(f"AUC of the six-point curve: {auc(curve):.2f}")
    print()
    print(report(result=result, curve=curve, fmt="markdown"))


if __name__ == "__main__":
    main()
