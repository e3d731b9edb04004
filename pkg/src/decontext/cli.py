"""Command-line entry points binding the library into reproducible runs."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import coref, metrics, plots, retrieval, stats
from .corpus import (
    Category,
    CorpusError,
    load_examples,
    parse_prediction,
)

EXIT_DATA_ERROR = 1
EXIT_USAGE = 2

DEFAULT_BUDGETS = [10.0 ** e for e in range(3, 10)]


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: str, command: str, config: dict, inputs: list[str]) -> None:
    config_json = json.dumps(config, sort_keys=True)
    manifest = {
        "command": command,
        "config": config,
        "config_sha256": hashlib.sha256(config_json.encode()).hexdigest(),
        "inputs": {p: _sha256_file(p) for p in sorted(set(inputs))},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as f:
        return tomllib.load(f)


def _resolve(flag_value, config: dict, key: str, default):
    """Flags win over the config file; the config wins over built-in defaults."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _read_examples(path: str):
    with open(path, "rb") as f:
        return load_examples(f)


def _read_predictions(path: str):
    preds = []
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                preds.append(parse_prediction(obj["raw"], obj["example_id"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusError(f"{path}: line {lineno}: bad prediction record") from exc
            except CorpusError as exc:
                raise CorpusError(f"{path}: line {lineno}: {exc}") from exc
    return preds


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    mode = _resolve(args.mode, config, "mode", "all")
    examples = _read_examples(args.examples)
    inputs = [args.examples]
    if args.baseline == "repeat":
        predictions = metrics.repeat_baseline(examples)
    elif args.predictions:
        predictions = _read_predictions(args.predictions)
        inputs.append(args.predictions)
    else:
        print("evaluate: need --predictions or --baseline repeat", file=sys.stderr)
        return EXIT_USAGE
    report = metrics.evaluate(
        examples,
        predictions,
        mode=mode,
        count_unnecessary=not args.strict_feasible,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "report.json"), "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    with open(
        os.path.join(args.out_dir, "per_example.csv"), "w", encoding="utf-8", newline=""
    ) as f:
        w = csv.writer(f)
        w.writerow(
            ["id", "match", "len_increase", "tp_add", "fp_add", "fn_add", "tp_del", "fp_del", "fn_del"]
        )
        for row in report.per_example:
            c = row.counts
            w.writerow(
                [
                    row.example_id,
                    int(row.matched),
                    round(float(row.length_increase), 4),
                    round(float(c.tp_add), 4),
                    round(float(c.fp_add), 4),
                    round(float(c.fn_add), 4),
                    round(float(c.tp_del), 4),
                    round(float(c.fp_del), 4),
                    round(float(c.fn_del), 4),
                ]
            )
    _write_manifest(
        args.out_dir,
        "evaluate",
        {
            "mode": mode,
            "baseline": args.baseline,
            "strict_feasible": args.strict_feasible,
            "seed": args.seed,
        },
        inputs,
    )
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_rewrite_coref(args: argparse.Namespace) -> int:
    examples = _read_examples(args.examples)
    with open(args.clusters, "rb") as f:
        cluster_map = coref.load_clusters(f)
    edits_per_example = []
    with open(args.out, "w", encoding="utf-8") as f:
        for ex in examples:
            sentence, edits = coref.rewrite_example(ex, cluster_map.get(ex.id))
            edits_per_example.append(edits)
            record = {
                "example_id": ex.id,
                "raw": coref.rewrite_prediction_raw(sentence, edits),
            }
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    modified = coref.rewrite_stats(edits_per_example)
    print(f"rewrote {len(examples)} examples; {modified:.1%} modified")
    out_dir = os.path.dirname(os.path.abspath(args.out))
    _write_manifest(out_dir, "rewrite-coref", {"seed": args.seed}, [args.examples, args.clusters])
    return 0


def _parse_strategies(value: str) -> list[retrieval.Strategy]:
    if value == "all":
        return list(retrieval.Strategy)
    try:
        return [retrieval.Strategy(v.strip()) for v in value.split(",")]
    except ValueError as exc:
        raise CorpusError(f"unknown strategy in {value!r}") from exc


def _segment_corpus(docs, strategy, dmap, window, stride):
    passages = []
    for doc in docs:
        passages.extend(
            retrieval.segment(
                doc, strategy, decontext_map=dmap.get(doc.doc_id), window=window, stride=stride
            )
        )
    return passages


def cmd_build_corpus(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    window = _resolve(args.window, config, "window", 100)
    stride = _resolve(args.stride, config, "stride", 50)
    strategies = _parse_strategies(_resolve(args.strategies, config, "strategies", "all"))
    with open(args.corpus, "rb") as f:
        docs = retrieval.load_corpus(f)
    inputs = [args.corpus]
    dmap = {}
    if args.decontext_map:
        with open(args.decontext_map, "rb") as f:
            dmap = retrieval.load_decontext_map(f)
        inputs.append(args.decontext_map)
    os.makedirs(args.out_dir, exist_ok=True)
    for strategy in strategies:
        passages = _segment_corpus(docs, strategy, dmap, window, stride)
        path = os.path.join(args.out_dir, f"passages_{strategy.value}.jsonl")
        with open(path, "w", encoding="utf-8") as f:
            for p in passages:
                f.write(
                    json.dumps(
                        {
                            "passage_id": p.passage_id,
                            "doc_id": p.doc_id,
                            "strategy": p.strategy.value,
                            "text": p.text,
                            "token_len": p.token_len,
                        },
                        sort_keys=True,
                        ensure_ascii=False,
                    )
                    + "\n"
                )
    _write_manifest(
        args.out_dir,
        "build-corpus",
        {
            "window": window,
            "stride": stride,
            "strategies": [s.value for s in strategies],
            "seed": args.seed,
        },
        inputs,
    )
    return 0


def cmd_retrieve_bench(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    window = _resolve(args.window, config, "window", 100)
    stride = _resolve(args.stride, config, "stride", 50)
    k = _resolve(args.k, config, "k", 100)
    ngrams = _resolve(args.ngrams, config, "ngrams", 2)
    jobs = _resolve(args.jobs, config, "jobs", 1)
    budgets = _resolve(
        [float(b) for b in args.budgets.split(",")] if args.budgets else None,
        config,
        "budgets",
        DEFAULT_BUDGETS,
    )
    budgets = sorted(float(b) for b in budgets)
    strategies = _parse_strategies(_resolve(args.strategies, config, "strategies", "all"))

    with open(args.corpus, "rb") as f:
        docs = retrieval.load_corpus(f)
    with open(args.questions, "rb") as f:
        questions = retrieval.load_questions(f)
    inputs = [args.corpus, args.questions]
    dmap = {}
    if args.decontext_map:
        with open(args.decontext_map, "rb") as f:
            dmap = retrieval.load_decontext_map(f)
        inputs.append(args.decontext_map)

    os.makedirs(args.out_dir, exist_ok=True)
    curves: dict[str, list[tuple[float, float]]] = {}
    per_question_rows = []
    for strategy in strategies:
        passages = _segment_corpus(docs, strategy, dmap, window, stride)
        index = retrieval.build_index(passages, ngrams=ngrams)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                runs = list(
                    pool.map(lambda q: retrieval.run_question(index, q, strategy, k), questions)
                )
        else:
            runs = [retrieval.run_question(index, q, strategy, k) for q in questions]
        curves[strategy.value] = retrieval.recall_curve(runs, budgets)
        for r in runs:
            per_question_rows.append(
                [r.qid, strategy.value, r.hit_index, "inf" if r.cost == float("inf") else int(r.cost)]
            )

    with open(os.path.join(args.out_dir, "recall.csv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["strategy", "budget", "recall"])
        for name in sorted(curves):
            for t, r in curves[name]:
                w.writerow([name, int(t) if float(t).is_integer() else t, f"{r:.6f}"])
    with open(
        os.path.join(args.out_dir, "per_question.csv"), "w", encoding="utf-8", newline=""
    ) as f:
        w = csv.writer(f)
        w.writerow(["qid", "strategy", "H", "O"])
        w.writerows(per_question_rows)
    plots.plot_recall_curves(curves, os.path.join(args.out_dir, "recall_curves.png"))
    _write_manifest(
        args.out_dir,
        "retrieve-bench",
        {
            "window": window,
            "stride": stride,
            "k": k,
            "ngrams": ngrams,
            "budgets": budgets,
            "strategies": [s.value for s in strategies],
            "jobs": jobs,
            "seed": args.seed,
        },
        inputs,
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    examples = _read_examples(args.examples)
    result = stats.dataset_stats(examples)
    print(json.dumps(result, indent=2, sort_keys=True))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "stats.json"), "w", encoding="utf-8") as f:
            json.dump(result, f, indent=2, sort_keys=True)
            f.write("\n")
        plots.plot_category_distribution(
            result["category_pct"], os.path.join(args.out_dir, "category_distribution.png")
        )
        _write_manifest(args.out_dir, "stats", {"seed": args.seed}, [args.examples])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decontext",
        description="Decontextualization evaluation, rule-based rewriting, and "
        "compute-budget retrieval benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="TOML config file; flags win over it")
        p.add_argument("--seed", type=int, default=0, help="recorded in the run manifest")

    p = sub.add_parser("evaluate", help="score predictions against human references")
    p.add_argument("--examples", required=True)
    p.add_argument("--predictions")
    p.add_argument("--baseline", choices=["repeat"], help="use a built-in baseline")
    p.add_argument("--mode", choices=["all", "edited_only"])
    p.add_argument(
        "--strict-feasible",
        action="store_true",
        help="count only FEASIBLE (not UNNECESSARY) toward the >=3 filter",
    )
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rewrite-coref", help="rewrite targets from coreference clusters")
    p.add_argument("--examples", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_rewrite_coref)

    p = sub.add_parser("build-corpus", help="segment documents into retrieval passages")
    p.add_argument("--corpus", required=True)
    p.add_argument("--decontext-map")
    p.add_argument("--strategies")
    p.add_argument("--window", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_build_corpus)

    p = sub.add_parser("retrieve-bench", help="recall at compute budget per strategy")
    p.add_argument("--corpus", required=True)
    p.add_argument("--questions", required=True)
    p.add_argument("--decontext-map")
    p.add_argument("--strategies")
    p.add_argument("--window", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--ngrams", type=int, choices=[1, 2])
    p.add_argument("--budgets", help="comma-separated ascending budget grid")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_retrieve_bench)

    p = sub.add_parser("stats", help="dataset statistics and agreement")
    p.add_argument("--examples", required=True)
    p.add_argument("--out-dir")
    common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (CorpusError, coref.CorefError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
