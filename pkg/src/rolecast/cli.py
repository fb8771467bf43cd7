"""Batch entry points.

    rolecast verbalize          hypotheses for every candidate of a corpus
    rolecast predict            role predictions + evaluation report
    rolecast recast             corpus -> premise/hypothesis training file
    rolecast split              seeded nested few-shot subsets
    rolecast eval               score a prediction file against a corpus
    rolecast auc                area under an F1-vs-fraction curve file
    rolecast compare-templates  per-role recall diff of two prediction files
    rolecast serve              run the HTTP facade (or a scorer endpoint)

All randomness flows from --seed; outputs are byte-identical across reruns
with identical inputs and seeds. Flags fall back to environment variables
prefixed with ROLECAST_ (e.g. ROLECAST_CORPUS). Errors exit nonzero with a
one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import evaluation, inference, recast, service
from .constraints import load_constraints
from .corpus import (
    SplitSpec,
    generate_candidates,
    load_corpus,
    make_splits,
    split_stats,
    unreachable_arguments,
)
from .entailment import build_scorer, load_backend_config, make_entailment_server
from .errors import RolecastError
from .ioutil import dumps_canonical, dumps_pretty, write_jsonl
from .templates import load_library


class CliError(RolecastError):
    pass


def _env_default(name: str, fallback=None):
    return os.environ.get(f"ROLECAST_{name}", fallback)


def _threshold(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold {value} outside [0, 1]")
    return value


def _fractions(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _require_files(args, names) -> None:
    for name in names:
        path = getattr(args, name, None)
        if not path:
            raise CliError(f"--{name.replace('_', '-')} is required "
                           f"(flag or ROLECAST_{name.upper()})")
        if not os.path.exists(path):
            raise CliError(f"--{name.replace('_', '-')}: no such file {path!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rolecast", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, **kwargs):
        p = sub.add_parser(name, help=help_text, **kwargs)
        p.add_argument("--seed", type=int, default=int(_env_default("SEED", 0)))
        p.add_argument("--format", choices=("markdown", "json"),
                       default=_env_default("FORMAT", "markdown"))
        return p

    p = add("verbalize", "write every candidate's hypotheses")
    for flag in ("corpus", "library", "constraints", "out"):
        p.add_argument(f"--{flag}", default=_env_default(flag.upper()))

    p = add("predict", "predict roles and report F1")
    for flag in ("corpus", "library", "constraints", "backend", "out"):
        p.add_argument(f"--{flag}", default=_env_default(flag.upper()))
    p.add_argument("--threshold", type=_threshold,
                   default=_threshold(_env_default("THRESHOLD", "0.5")))
    p.add_argument("--report", default=None, help="also write the report here")

    p = add("recast", "convert a corpus to premise/hypothesis records")
    for flag in ("corpus", "library", "constraints", "out"):
        p.add_argument(f"--{flag}", default=_env_default(flag.upper()))
    p.add_argument("--ne", type=int, default=2, help="entailment samples per positive")
    p.add_argument("--nn", type=int, default=5, help="neutral samples per positive")
    p.add_argument("--nc", type=int, default=5, help="contradiction samples per negative")
    p.add_argument("--constrained", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--source", default="corpus", help="source name stamped into provenance")

    p = add("split", "seeded nested few-shot subsets")
    p.add_argument("--corpus", default=_env_default("CORPUS"))
    p.add_argument("--out", default=_env_default("OUT"))
    p.add_argument("--fractions", type=_fractions, default=(0.01, 0.05, 0.1, 0.2, 1.0))

    p = add("eval", "score a prediction file against gold")
    p.add_argument("--corpus", default=_env_default("CORPUS"))
    p.add_argument("--predictions", default=None)
    p.add_argument("--coref", action="store_true", help="also score with coref credit")
    p.add_argument("--out", default=_env_default("OUT"), help="write the report here")

    p = add("auc", "area under an F1 curve file (fraction,f1 lines)")
    p.add_argument("curve", help="path to the curve file")

    p = add("compare-templates", "recall diff between two prediction files")
    p.add_argument("--corpus", default=_env_default("CORPUS"))
    p.add_argument("--predictions-a", dest="predictions_a", default=None)
    p.add_argument("--predictions-b", dest="predictions_b", default=None)

    p = add("serve", "run the HTTP facade or a scorer endpoint")
    p.add_argument("--kind", choices=("facade", "scorer"), default="facade")
    p.add_argument("--config", default=_env_default("CONFIG"))
    for flag in ("library", "constraints", "backend", "corpus"):
        p.add_argument(f"--{flag}", default=_env_default(flag.upper()))
    p.add_argument("--host", default=_env_default("HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(_env_default("PORT", 8710)))
    p.add_argument("--threshold", type=_threshold,
                   default=_threshold(_env_default("THRESHOLD", "0.5")))
    return parser


# ---------------------------------------------------------------------------
# Commands

def cmd_verbalize(args) -> int:
    _require_files(args, ("corpus", "library", "constraints"))
    if not args.out:
        raise CliError("--out is required")
    docs = load_corpus(args.corpus)
    library = load_library(args.library)
    table = load_constraints(args.constraints)
    rows = []
    for doc in docs:
        for candidate in generate_candidates(doc):
            _, planned = inference._candidate_plan(candidate, doc, library, table)
            for role, template_id, hypothesis in planned:
                rows.append({
                    "doc": candidate.document_id, "event": candidate.event_id,
                    "entity": candidate.entity_id, "role": role,
                    "template": template_id, "hypothesis": hypothesis,
                })
    n = write_jsonl(args.out, rows)
    print(f"wrote {n} hypotheses to {args.out}")
    return 0


def cmd_predict(args) -> int:
    _require_files(args, ("corpus", "library", "constraints", "backend"))
    if not args.out:
        raise CliError("--out is required")
    docs = load_corpus(args.corpus)
    library = load_library(args.library)
    table = load_constraints(args.constraints)
    scorer = build_scorer(load_backend_config(args.backend))
    config = inference.InferenceConfig(threshold=args.threshold)

    predictions = []
    candidates = []
    unreachable = []
    for doc in docs:
        predictions.extend(inference.predict_document(doc, library, table, scorer, config))
        candidates.extend(generate_candidates(doc))
        unreachable.extend(unreachable_arguments(doc))
    inference.write_predictions(predictions, args.out)

    result = evaluation.score_f1(candidates, predictions, unreachable)
    text = evaluation.report(result=result, fmt=args.format, threshold=args.threshold)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text)
    return 0


def cmd_recast(args) -> int:
    _require_files(args, ("corpus", "library", "constraints"))
    if not args.out:
        raise CliError("--out is required")
    docs = load_corpus(args.corpus)
    library = load_library(args.library)
    table = load_constraints(args.constraints)
    config = recast.SamplingConfig(
        n_entail=args.ne, n_neutral=args.nn, n_contradict=args.nc,
        constrained=args.constrained, seed=args.seed,
    )
    summary = recast.recast_corpus(docs, library, table, args.out,
                                   config=config, source=args.source)
    print(dumps_canonical(summary.to_record()))
    return 0


def cmd_split(args) -> int:
    _require_files(args, ("corpus",))
    if not args.out:
        raise CliError("--out is required")
    docs = load_corpus(args.corpus)
    candidates = [c for doc in docs for c in generate_candidates(doc)]
    spec = SplitSpec(fractions=tuple(sorted(set(args.fractions))), seed=args.seed)
    splits = make_splits(candidates, spec)
    os.makedirs(args.out, exist_ok=True)
    stats = {}
    for fraction, subset in splits.items():
        out_path = os.path.join(args.out, f"split_{fraction:g}.jsonl")
        write_jsonl(out_path, ({
            "doc": c.document_id, "event": c.event_id,
            "entity": c.entity_id, "gold": c.gold_role,
        } for c in subset))
        s = split_stats(subset)
        stats[f"{fraction:g}"] = {
            "total": s.total,
            "mean_positives_per_role": s.mean_positives_per_role,
            "per_role_positive": s.per_role_positive,
            "file": os.path.basename(out_path),
        }
    with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps_pretty({"seed": args.seed, "splits": stats}))
    print(f"wrote {len(splits)} splits to {args.out}")
    return 0


def _aligned_predictions(docs, records):
    """Match prediction records to corpus candidates by (doc, event, entity)."""
    by_key = {}
    for record in records:
        by_key[(record["doc"], record["event"], record["entity"])] = record["predicted"]
    candidates = [c for doc in docs for c in generate_candidates(doc)]
    missing = [c.key for c in candidates if c.key not in by_key]
    if missing:
        raise CliError(f"predictions missing for {len(missing)} candidates, e.g. {missing[0]}")
    extra = set(by_key) - {c.key for c in candidates}
    if extra:
        raise CliError(f"predictions for unknown candidates, e.g. {sorted(extra)[0]}")
    return candidates, [by_key[c.key] for c in candidates]


def cmd_eval(args) -> int:
    _require_files(args, ("corpus", "predictions"))
    docs = load_corpus(args.corpus)
    records = inference.read_predictions(args.predictions)
    candidates, labels = _aligned_predictions(docs, records)
    unreachable = [u for doc in docs for u in unreachable_arguments(doc)]
    result = evaluation.score_f1(candidates, labels, unreachable)
    text = evaluation.report(result=result, fmt=args.format)
    if args.coref:
        chains = evaluation.coref_index(docs)
        coref_result = evaluation.score_coref_f1(candidates, labels, chains, unreachable)
        text += evaluation.report(result=coref_result, fmt=args.format).replace(
            "# Evaluation report", "# Coref-credited evaluation report", 1,
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text)
    return 0


def cmd_auc(args) -> int:
    points = evaluation.read_curve_file(args.curve)
    print(f"{evaluation.auc(points):.2f}")
    return 0


def cmd_compare(args) -> int:
    _require_files(args, ("corpus", "predictions_a", "predictions_b"))
    docs = load_corpus(args.corpus)
    candidates, labels_a = _aligned_predictions(docs, inference.read_predictions(args.predictions_a))
    _, labels_b = _aligned_predictions(docs, inference.read_predictions(args.predictions_b))
    unreachable = [u for doc in docs for u in unreachable_arguments(doc)]
    diffs = evaluation.recall_diff(labels_a, labels_b, candidates, unreachable)
    if args.format == "json":
        print(dumps_pretty({
            role: {"a_only": d.a_only, "b_only": d.b_only, "same": d.same}
            for role, d in sorted(diffs.items())
        }))
    else:
        print("| role | a_only | b_only | |")
        print("|---|---|---|---|")
        for role, d in sorted(diffs.items()):
            marker = "same" if d.same else ""
            print(f"| {role} | {d.a_only:.4f} | {d.b_only:.4f} | {marker} |")
    return 0


def cmd_serve(args) -> int:
    if args.kind == "scorer":
        _require_files(args, ("backend",))
        scorer_config = load_backend_config(args.backend)
        backend = build_scorer(scorer_config).backend
        server = make_entailment_server(backend, args.host, args.port)
        print(f"scorer endpoint on http://{args.host}:{server.server_address[1]}/v1/entail",
              flush=True)
        try:
            server.serve_forever()
        finally:
            server.server_close()
        return 0

    if args.config:
        config = service.load_service_config(args.config)
    else:
        _require_files(args, ("library", "constraints", "backend"))
        config = service.ServiceConfig(
            host=args.host, port=args.port,
            library_path=args.library, constraints_path=args.constraints,
            backend=load_backend_config(args.backend),
            corpus_path=args.corpus, threshold=args.threshold,
        )
    config.host = args.host or config.host
    if args.port:
        config.port = args.port
    svc = service.WorkbenchService.from_config(config)
    server = service.make_service_server(svc, config.host, config.port)
    print(f"service on http://{config.host}:{server.server_address[1]}/v1", flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return 0


_COMMANDS = {
    "verbalize": cmd_verbalize,
    "predict": cmd_predict,
    "recast": cmd_recast,
    "split": cmd_split,
    "eval": cmd_eval,
    "auc": cmd_auc,
    "compare-templates": cmd_compare,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except RolecastError as exc:
        sys.stderr.write(dumps_canonical(
            {"error": type(exc).__name__, "message": str(exc)}
        ) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
