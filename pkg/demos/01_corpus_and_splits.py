"""Corpus model walkthrough: documents, candidates, few-shot splits.

Real EAE corpora are licensed, so everything here runs on generated
documents. Run: python demos/01_corpus_and_splits.py
"""

import tempfile
from pathlib import Path

from rolecast import synthetic
from rolecast.corpus import (
    SplitSpec,
    generate_candidates,
    load_corpus,
    make_splits,
    save_corpus,
    split_stats,
)


def main():
    world = synthetic.make_world(n_subtypes=4, n_roles=5, seed=7)
    docs = synthetic.random_corpus(world, 20, seed=13, n_sentences=3)
    print(f"generated {len(docs)} documents over roles {world.roles}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "corpus.jsonl"
        save_corpus(docs, path)
        reloaded = load_corpus(path)
        print(f"round-trip through {path.name}: {reloaded == docs}")

    candidates = [c for doc in docs for c in generate_candidates(doc)]
    positives = [c for c in candidates if c.is_positive]
    print(f"{len(candidates)} trigger-entity candidates, {len(positives)} positive")

    # Nested subsets, sampled at event granularity: split(0.05) is always
    # contained in split(0.2) for the same seed.
    splits = make_splits(candidates, SplitSpec(fractions=(0.05, 0.2, 1.0), seed=42))
    for fraction, subset in splits.items():
        stats = split_stats(subset, roles=world.roles)
        print(f"  {fraction:>5}: total={stats.total:4d} "
              f"mean positives/role={stats.mean_positives_per_role:.2f}")
    small = {c.key for c in splits[0.05]}
    large = {c.key for c in splits[0.2]}
    print(f"nestedness holds: {small <= large}")


if __name__ == "__main__":
    main()
