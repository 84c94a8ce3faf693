"""JSONL schemas for datasets, elaboration records, and predictions.

Dataset rows store rendered sentences only; loading re-parses them against
the lexicon, which is lossless because rendering round-trips.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from . import cnl
from .backends import DecodingPolicy
from .elaborate import ElaborationRecord, Strategy
from .generator import TaskItem, build_answer_set
from .lexicon import Lexicon
from .logic import FormalProblem, Literal, Rule, effective_distraction
from .predict import ScoredPrediction


class SchemaError(ValueError):
    pass


def item_to_row(item: TaskItem) -> dict:
    p = item.problem
    return {
        "id": item.item_id,
        "fact": cnl.render_statement(p.fact),
        "rulechain": [cnl.render_statement(r) for r in p.chain],
        "distractors": [cnl.render_statement(r) for r in p.distractors],
        "conclusion": item.answers[0],
        "alternatives": [item.answers[1], item.answers[2]],
        "depth": p.depth,
        "breadth": p.breadth,
        "contraposition": p.contraposition,
        "effective_distraction": item.effective_distraction,
        "subject": item.subject,
        "context": list(item.context),
        "scrambled": p.scrambled,
    }


def _parse(sentence: str, lexicon: Lexicon, want):
    parsed = cnl.parse_statement(sentence, lexicon)
    if not isinstance(parsed, want):
        raise SchemaError(f"cannot parse {sentence!r} as {want.__name__}")
    return parsed


def row_to_item(row: dict, lexicon: Lexicon) -> TaskItem:
    fact = _parse(row["fact"], lexicon, Literal)
    chain = tuple(_parse(s, lexicon, Rule) for s in row["rulechain"])
    distractors = tuple(_parse(s, lexicon, Rule) for s in row["distractors"])
    conclusion = _parse(row["conclusion"], lexicon, Literal)
    _, alt1, alt2 = build_answer_set(conclusion, lexicon)
    problem = FormalProblem(
        fact=fact,
        chain=chain,
        distractors=distractors,
        conclusion=conclusion,
        alternatives=(alt1, alt2),
        contraposition=bool(row["contraposition"]),
        depth=int(row["depth"]),
        breadth=int(row["breadth"]),
        scrambled=bool(row.get("scrambled", False)),
    )
    by_sentence = {cnl.render_statement(s): s for s in problem.statements}
    try:
        statements = tuple(by_sentence[s] for s in row["context"])
    except KeyError as exc:
        raise SchemaError(f"context sentence not part of the problem: {exc}") from exc
    item = TaskItem(
        item_id=row["id"],
        problem=problem,
        subject=row["subject"],
        context_statements=statements,
        context=tuple(row["context"]),
        answers=tuple(cnl.render_statement(a) for a in (conclusion, alt1, alt2)),
        answer_literals=(conclusion, alt1, alt2),
        effective_distraction=int(row["effective_distraction"]),
    )
    if not problem.scrambled and effective_distraction(problem) != item.effective_distraction:
        raise SchemaError(f"effective_distraction mismatch in {row['id']}")
    return item


def record_to_row(record: ElaborationRecord) -> dict:
    decoding = None
    if record.decoding is not None:
        decoding = {
            "mode": record.decoding.mode,
            "top_p": record.decoding.top_p,
            "beam_width": record.decoding.beam_width,
            "max_new_tokens": record.decoding.max_new_tokens,
            "seed": record.decoding.seed,
        }
    return {
        "item_id": record.item_id,
        "strategy": record.strategy.value,
        "query": record.query,
        "sentences": list(record.sentences),
        "full_text": record.full_text,
        "classes": list(record.per_sentence_class),
        "degenerate": record.degenerate,
        "decoding": decoding,
    }


def row_to_record(row: dict) -> ElaborationRecord:
    decoding = None
    if row.get("decoding"):
        decoding = DecodingPolicy(**row["decoding"])
    return ElaborationRecord(
        item_id=row["item_id"],
        strategy=Strategy(row["strategy"]),
        query=row["query"],
        sentences=tuple(row["sentences"]),
        full_text=row["full_text"],
        per_sentence_class=tuple(row["classes"]),
        decoding=decoding,
        degenerate=bool(row.get("degenerate", False)),
    )


def prediction_to_row(pred: ScoredPrediction) -> dict:
    return {
        "item_id": pred.item_id,
        "strategy": pred.strategy.value,
        "logprobs": list(pred.logprobs),
        "chosen": pred.chosen,
        "correct": pred.correct,
        "binary_prob": pred.binary_prob,
        "skipped": pred.skipped,
    }


def row_to_prediction(row: dict) -> ScoredPrediction:
    return ScoredPrediction(
        item_id=row["item_id"],
        strategy=Strategy(row["strategy"]),
        logprobs=tuple(row["logprobs"]),
        chosen=int(row["chosen"]),
        correct=bool(row["correct"]),
        binary_prob=float(row["binary_prob"]),
        skipped=bool(row.get("skipped", False)),
    )


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows
