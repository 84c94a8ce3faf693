"""Command-line pipeline: gen -> elaborate -> predict -> analyze.

All stage outputs are line-delimited UTF-8; stages are idempotent given
identical inputs and deterministic given a seed. Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import fixtures, metrics, serialization
from .backends import FallbackEmbedder, HttpBackend, MockBackend, TransportError
from .elaborate import (
    GENERATED_STRATEGIES,
    SYNTHETIC_STRATEGIES,
    Strategy,
    elaborate_item,
    empty_record,
)
from .generator import GenerationSpec, TaskItem, generate_dataset
from .lexicon import Lexicon, default_lexicon
from .predict import evaluate_run, score_answers

ENV_BACKEND_URL = "CHAINRULER_BACKEND_URL"
ENV_EMBEDDER_URL = "CHAINRULER_EMBEDDER_URL"


class UsageError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _resolve(flag, env_name: str, config: dict, key: str, default):
    # precedence: flags > environment > config file > default
    if flag is not None:
        return flag
    env = os.environ.get(env_name)
    if env:
        return env
    if key in config:
        return config[key]
    return default


def _make_backend(spec: str, lexicon: Lexicon):
    if spec == "mock":
        return MockBackend(lexicon)
    if spec.startswith(("http://", "https://")):
        return HttpBackend(spec)
    raise UsageError(f"backend must be 'mock' or an http(s) URL, got {spec!r}")


def _make_embedder(spec: str):
    if spec == "fallback":
        return FallbackEmbedder()
    if spec.startswith(("http://", "https://")):
        return HttpBackend(spec)
    raise UsageError(f"embedder must be 'fallback' or an http(s) URL, got {spec!r}")


def _load_lexicon(path: str | None) -> Lexicon:
    return Lexicon.from_file(path) if path else default_lexicon()


def _parse_range(text: str, name: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError as exc:
        raise UsageError(f"bad {name} range {text!r} (expected e.g. 1..5)") from exc


def _load_items(path: str, lexicon: Lexicon) -> list[TaskItem]:
    return [serialization.row_to_item(row, lexicon) for row in
            serialization.read_jsonl(path)]


def _parse_strategies(text: str) -> list[Strategy]:
    if text == "all":
        return list(GENERATED_STRATEGIES) + list(SYNTHETIC_STRATEGIES)
    out = []
    for name in text.split(","):
        name = name.strip()
        try:
            strategy = Strategy(name)
        except ValueError as exc:
            raise UsageError(f"unknown strategy {name!r}") from exc
        if strategy == Strategy.NONE:
            raise UsageError("'none' needs no elaboration records; it is always predicted")
        out.append(strategy)
    return out


# --- gen ------------------------------------------------------------------

def cmd_gen(args, config: dict) -> int:
    lexicon = _load_lexicon(args.lexicon)
    if args.fixtures:
        items = fixtures.fixture_items(lexicon)
    else:
        spec = GenerationSpec(
            depth_range=_parse_range(args.depth, "depth"),
            breadth_range=_parse_range(args.breadth, "breadth"),
            contraposition={"both": "both", "true": "only-true",
                            "false": "only-false"}[args.contraposition],
            items_per_cell=args.per_cell,
            seed=args.seed,
            fact_negation_rate=args.fact_negation_rate,
            conclusion_negation_rate=args.conclusion_negation_rate,
            intermediary_negation_rate=args.intermediary_negation_rate,
            scrambled=args.scrambled,
        )
        items = generate_dataset(spec, lexicon)
    serialization.write_jsonl(args.out, (serialization.item_to_row(i) for i in items))
    print(f"wrote {len(items)} items to {args.out}")
    return 0


# --- elaborate ------------------------------------------------------------

def cmd_elaborate(args, config: dict) -> int:
    lexicon = _load_lexicon(args.lexicon)
    backend_spec = _resolve(args.backend, ENV_BACKEND_URL, config, "backend", "mock")
    backend = _make_backend(backend_spec, lexicon)
    strategies = _parse_strategies(args.strategies)
    items = _load_items(args.dataset, lexicon)

    out_path = Path(args.out)
    existing: dict[tuple[str, str], dict] = {}
    if out_path.exists():
        for row in serialization.read_jsonl(out_path):
            existing[(row["item_id"], row["strategy"])] = row

    def work(task: tuple[TaskItem, Strategy]):
        item, strategy = task
        key = (item.item_id, strategy.value)
        if key in existing:
            return key, existing[key]
        try:
            record = elaborate_item(item, strategy, backend, lexicon, seed=args.seed)
        except TransportError as exc:
            return key, {"item_id": item.item_id, "strategy": strategy.value,
                         "skipped": True, "error": str(exc)}
        return key, serialization.record_to_row(record)

    tasks = [(item, s) for item in items for s in strategies]
    with ThreadPoolExecutor(max_workers=args.concurrency) as pool:
        results = dict(pool.map(work, tasks))

    rows = [results[key] for key in sorted(results)]
    serialization.write_jsonl(out_path, rows)
    failures = sum(1 for r in rows if r.get("skipped"))
    print(f"wrote {len(rows)} elaboration records to {out_path} "
          f"({failures} skipped)")
    if failures and failures == len(rows):
        print("all elaborations failed", file=sys.stderr)
        return 1
    return 0


# --- predict --------------------------------------------------------------

def cmd_predict(args, config: dict) -> int:
    lexicon = _load_lexicon(args.lexicon)
    backend_spec = _resolve(args.backend, ENV_BACKEND_URL, config, "backend", "mock")
    backend = _make_backend(backend_spec, lexicon)
    items = _load_items(args.dataset, lexicon)
    by_id = {item.item_id: item for item in items}

    records = {(Strategy.NONE.value, item.item_id): empty_record(item.item_id)
               for item in items}
    if args.elaborations:
        for row in serialization.read_jsonl(args.elaborations):
            if row.get("skipped"):
                continue
            record = serialization.row_to_record(row)
            records[(record.strategy.value, record.item_id)] = record

    def work(key):
        strategy, item_id = key
        return key, score_answers(by_id[item_id], records[key], backend)

    with ThreadPoolExecutor(max_workers=args.concurrency) as pool:
        results = dict(pool.map(work, sorted(records)))

    rows = [serialization.prediction_to_row(results[key]) for key in sorted(results)]
    serialization.write_jsonl(args.out, rows)
    skipped = sum(1 for r in rows if r["skipped"])
    print(f"wrote {len(rows)} predictions to {args.out} ({skipped} skipped)")
    if skipped and skipped == len(rows):
        print("all predictions failed", file=sys.stderr)
        return 1
    return 0


# --- analyze --------------------------------------------------------------

def _write_grid_csv(path: Path, grid: dict, depths: list[int], eds: list[int]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eff_distraction\\depth"] + depths)
        for ed in eds:
            row = [ed]
            for depth in depths:
                value = grid.get((ed, depth))
                row.append("" if value is None else f"{value:.4f}")
            writer.writerow(row)


def cmd_analyze(args, config: dict) -> int:
    lexicon = _load_lexicon(args.lexicon)
    embedder_spec = _resolve(args.embedder, ENV_EMBEDDER_URL, config,
                             "embedder", "fallback")
    embedder = _make_embedder(embedder_spec)
    items = _load_items(args.dataset, lexicon)
    by_id = {item.item_id: item for item in items}
    predictions = [serialization.row_to_prediction(row)
                   for row in serialization.read_jsonl(args.predictions)]
    strategies_present = {p.strategy.value for p in predictions}
    if Strategy.NONE.value not in strategies_present:
        print("predictions lack strategy 'none'; deltas undefined", file=sys.stderr)
        return 1
    records = {}
    if args.elaborations:
        for row in serialization.read_jsonl(args.elaborations):
            if row.get("skipped"):
                continue
            record = serialization.row_to_record(row)
            records[(record.strategy.value, record.item_id)] = record

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = evaluate_run(predictions, by_id)

    depths = sorted({i.depth for i in items})
    eds = sorted({i.effective_distraction for i in items})
    for strategy in grid.strategies():
        for contraposition in (False, True):
            cells = grid.grid(strategy, contraposition)
            if not cells:
                continue
            tag = f"{strategy}_cntrp{int(contraposition)}"
            _write_grid_csv(outdir / f"accuracy_{tag}.csv", cells, depths, eds)
            if strategy != Strategy.NONE.value:
                deltas = grid.delta_grid(strategy, contraposition)
                _write_grid_csv(outdir / f"delta_{tag}.csv", deltas, depths, eds)

    # Table-3-style unnegated-fact deltas, split by contraposition flag
    _write_unnegated_table(outdir / "unnegated_fact_deltas.csv", predictions, by_id)

    # per-item metrics
    metric_rows = _per_item_metrics(predictions, records, by_id, embedder)
    serialization.write_jsonl(outdir / "metrics.jsonl", metric_rows)

    # regression report
    report = _regression_report(predictions, metric_rows, by_id)
    (outdir / "regression.txt").write_text(report, encoding="utf-8")
    print(f"analysis written to {outdir}")
    return 0


def _write_unnegated_table(path: Path, predictions, by_id) -> None:
    stats: dict[tuple[str, bool], list[int]] = {}
    for pred in predictions:
        if pred.skipped:
            continue
        item = by_id[pred.item_id]
        all_key = (pred.strategy.value, item.contraposition)
        stats.setdefault(all_key, [0, 0, 0, 0])
        stats[all_key][0] += 1
        stats[all_key][1] += int(pred.correct)
        if item.problem.fact.polarity:
            stats[all_key][2] += 1
            stats[all_key][3] += int(pred.correct)
    strategies = sorted({k[0] for k in stats})
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["contraposition"] + strategies)
        for contraposition in (False, True):
            row = [contraposition]
            for strategy in strategies:
                rec = stats.get((strategy, contraposition))
                if not rec or rec[0] == 0 or rec[2] == 0:
                    row.append("")
                else:
                    delta = rec[3] / rec[2] - rec[1] / rec[0]
                    row.append(f"{100 * delta:.1f}")
            writer.writerow(row)


def _per_item_metrics(predictions, records, by_id, embedder) -> list[dict]:
    rows = []
    for pred in sorted(predictions, key=lambda p: (p.item_id, p.strategy.value)):
        if pred.skipped:
            continue
        item = by_id[pred.item_id]
        strategy = pred.strategy.value
        record = records.get((strategy, pred.item_id))
        elab_text = record.full_text if record else ""
        luck = metrics.total_luck(item.context_text, elab_text,
                                  item.problem.conclusion)
        proof_chain, conclusions = metrics.ideal_elaborations(item.problem,
                                                              item.subject)
        row = {
            "item_id": pred.item_id,
            "strategy": strategy,
            "correct": pred.correct,
            "binary_prob": pred.binary_prob,
            "luck_context": luck.context_hits,
            "luck_elaboration": luck.elaboration_hits,
            "luck_total": luck.total,
        }
        if record and record.full_text:
            row.update({
                "verisimilitude": metrics.semantic_similarity(
                    record, "conclusion", item, embedder),
                "pertinence": metrics.semantic_similarity(
                    record, "question", item, embedder),
                "faithfulness": metrics.semantic_similarity(
                    record, "context", item, embedder),
                "bleu2_proof_chain": metrics.bleu2(record.full_text, proof_chain),
                "bleu2_conclusions": metrics.bleu2(record.full_text, conclusions),
                "redundancy": metrics.redundancy(record.sentences),
                "coherence": metrics.coherence(record.sentences, embedder),
                "classes": list(record.per_sentence_class),
            })
        rows.append(row)
    return rows


def _regression_report(predictions, metric_rows, by_id) -> str:
    lines = ["logistic regressions of per-item correctness", ""]
    by_strategy: dict[str, list[dict]] = {}
    for row in metric_rows:
        by_strategy.setdefault(row["strategy"], []).append(row)

    def fit_block(name: str, rows: list[dict], feature_names: list[str],
                  extract) -> None:
        data = [(extract(r), r["correct"]) for r in rows]
        data = [(x, y) for x, y in data if all(v is not None for v in x)]
        if len(data) < 10 * len(feature_names):
            lines.append(f"{name}: skipped (n={len(data)} too small)")
            return
        features = [x for x, _ in data]
        labels = [y for _, y in data]
        try:
            result = metrics.logistic_fit(features, labels, feature_names)
        except ValueError as exc:
            lines.append(f"{name}: failed ({exc})")
            return
        coeffs = ", ".join(f"{k}={v:+.3f}" for k, v in result.coefficients.items())
        lines.append(
            f"{name}: n={result.n} McFadden R2={100 * result.pseudo_r2:.1f}% "
            f"Cox-Snell R2={100 * result.cox_snell_r2:.1f}% "
            f"converged={result.converged} | {coeffs}"
        )

    structural = lambda r: (by_id[r["item_id"]].depth,
                            by_id[r["item_id"]].effective_distraction)
    all_rows = [r for rows in by_strategy.values() for r in rows]
    fit_block("all strategies / depth+eff_distraction", all_rows,
              ["depth", "eff_distraction"], structural)
    sim_rows = [r for r in all_rows if "verisimilitude" in r]
    fit_block(
        "generated strategies / + similarity features", sim_rows,
        ["depth", "eff_distraction", "verisimilitude", "pertinence", "faithfulness"],
        lambda r: (by_id[r["item_id"]].depth,
                   by_id[r["item_id"]].effective_distraction,
                   r["verisimilitude"], r["pertinence"], r["faithfulness"]),
    )
    for strategy, rows in sorted(by_strategy.items()):
        rows = [r for r in rows if "bleu2_proof_chain" in r]
        fit_block(
            f"{strategy} / depth+breadth+proof-chain-similarity", rows,
            ["depth", "breadth", "bleu2_proof_chain"],
            lambda r: (by_id[r["item_id"]].depth, by_id[r["item_id"]].breadth,
                       r["bleu2_proof_chain"]),
        )
    return "\n".join(lines) + "\n"


# --- entry point ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainruler",
        description="Synthesize rule-chain reasoning tasks, elaborate, predict, analyze.",
    )
    parser.add_argument("--config", help="JSON config file (lowest precedence)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a dataset")
    gen.add_argument("--depth", default="1..5")
    gen.add_argument("--breadth", default="0..5")
    gen.add_argument("--contraposition", choices=("both", "true", "false"),
                     default="both")
    gen.add_argument("--per-cell", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--fact-negation-rate", type=float, default=0.5)
    gen.add_argument("--conclusion-negation-rate", type=float, default=0.5)
    gen.add_argument("--intermediary-negation-rate", type=float, default=0.0)
    gen.add_argument("--scrambled", action="store_true",
                     help="emit the scrambled-antecedent control condition")
    gen.add_argument("--fixtures", action="store_true",
                     help="emit the two hand-encoded reference items instead")
    gen.add_argument("--lexicon")
    gen.add_argument("-o", "--out", required=True)
    gen.set_defaults(func=cmd_gen)

    elab = sub.add_parser("elaborate", help="generate elaboration records")
    elab.add_argument("--dataset", required=True)
    elab.add_argument("--strategies", default="all",
                      help="comma-separated strategy names, or 'all'")
    elab.add_argument("--backend", help="'mock' or backend base URL")
    elab.add_argument("--seed", type=int, default=0)
    elab.add_argument("--concurrency", type=int, default=4)
    elab.add_argument("--lexicon")
    elab.add_argument("-o", "--out", required=True)
    elab.set_defaults(func=cmd_elaborate)

    pred = sub.add_parser("predict", help="score answers")
    pred.add_argument("--dataset", required=True)
    pred.add_argument("--elaborations")
    pred.add_argument("--backend", help="'mock' or backend base URL")
    pred.add_argument("--concurrency", type=int, default=4)
    pred.add_argument("--lexicon")
    pred.add_argument("-o", "--out", required=True)
    pred.set_defaults(func=cmd_predict)

    ana = sub.add_parser("analyze", help="emit grids, metrics, and reports")
    ana.add_argument("--dataset", required=True)
    ana.add_argument("--elaborations")
    ana.add_argument("--predictions", required=True)
    ana.add_argument("--embedder", help="'fallback' or embedder base URL")
    ana.add_argument("--lexicon")
    ana.add_argument("--outdir", required=True)
    ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
