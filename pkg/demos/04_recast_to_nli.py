"""Recasting a corpus into premise/hypothesis training records, plus the
multi-source manifest handed to an external trainer.

Run: python demos/04_recast_to_nli.py
"""

import tempfile
from pathlib import Path

from rolecast import synthetic
from rolecast.recast import (
    SamplingConfig,
    build_manifest,
    read_recast_file,
    recast_corpus,
    save_manifest,
)


def main():
    world = synthetic.make_world(seed=3)
    docs = synthetic.random_corpus(world, 15, seed=9)

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "train.nli.jsonl"
        # 2 entailment + 5 neutral per positive, 5 contradictions per
        # surviving negative; constrained sampling drops negatives that
        # match no role of the event subtype.
        summary = recast_corpus(docs, world.library, world.table, out,
                                SamplingConfig(n_entail=2, n_neutral=5, n_contradict=5,
                                               constrained=True, seed=0),
                                source="demo-corpus")
        print("summary:", summary.to_record())
        for example in read_recast_file(out)[:4]:
            print(f"  {example.label:<13} P: {example.premise[:44]}...")
            print(f"  {'':<13} H: {example.hypothesis}")

        # Sequential fine-tuning order for multi-source transfer; the
        # target task always comes last. Pre-recast relation extraction
        # data slots in as just another stage.
        manifest = build_manifest(
            sources=[("relation-extraction-recast", "re.nli.jsonl", 25),
                     ("other-event-schema-recast", "events.nli.jsonl", 25)],
            target=("demo-corpus", str(out), 50),
        )
        manifest_path = Path(tmp) / "manifest.json"
        save_manifest(manifest, manifest_path)
        print("manifest stages:", [s.name for s in manifest.stages])


if __name__ == "__main__":
    main()
