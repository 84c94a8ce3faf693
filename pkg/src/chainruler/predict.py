"""Answer scoring, argmax prediction, binary normalization, and accuracy grids."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .backends import Backend, TransportError
from .elaborate import ElaborationRecord, Strategy, empty_record
from .generator import TaskItem


@dataclass(frozen=True)
class ScoredPrediction:
    item_id: str
    strategy: Strategy
    logprobs: tuple[float, float, float]
    chosen: int
    correct: bool
    binary_prob: float
    skipped: bool = False

    @classmethod
    def skip(cls, item_id: str, strategy: Strategy) -> "ScoredPrediction":
        return cls(item_id, strategy, (0.0, 0.0, 0.0), 0, False, 0.5, skipped=True)


def binary_normalize(logp_a: float, logp_nota: float) -> float:
    """exp(a) / (exp(a) + exp(nota)), computed shift-stably."""
    m = max(logp_a, logp_nota)
    ea = math.exp(logp_a - m)
    en = math.exp(logp_nota - m)
    return ea / (ea + en)


def compose_prompt(item: TaskItem, elab: ElaborationRecord) -> str:
    if elab.full_text:
        return f"{item.context_text} {elab.full_text} "
    return f"{item.context_text} "


def score_answers(item: TaskItem, elab: ElaborationRecord | None,
                  backend: Backend) -> ScoredPrediction:
    """Score the three answers as continuations of context (+ elaboration).

    Answers are in canonical order (conclusion, negation, complement); the
    argmax tie-break picks the lowest index. Backend failures yield a
    skipped prediction, never a guess.
    """
    if elab is None:
        elab = empty_record(item.item_id)
    prompt = compose_prompt(item, elab)
    try:
        logprobs = tuple(
            backend.score_continuation(prompt, answer) for answer in item.answers
        )
    except TransportError:
        return ScoredPrediction.skip(item.item_id, elab.strategy)
    chosen = max(range(3), key=lambda i: (logprobs[i], -i))
    return ScoredPrediction(
        item_id=item.item_id,
        strategy=elab.strategy,
        logprobs=logprobs,
        chosen=chosen,
        correct=chosen == 0,
        binary_prob=binary_normalize(logprobs[0], logprobs[1]),
    )


# --- aggregation ----------------------------------------------------------

CellKey = tuple[int, int]  # (effective_distraction, depth)


@dataclass
class CellStats:
    n: int = 0
    correct: int = 0
    skipped: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.n


@dataclass
class AccuracyGrid:
    """Per-cell accuracy keyed by (strategy, contraposition, eff. distraction, depth)."""

    cells: dict[tuple[str, bool], dict[CellKey, CellStats]] = field(
        default_factory=lambda: defaultdict(lambda: defaultdict(CellStats))
    )
    unnegated_fact: dict[str, CellStats] = field(
        default_factory=lambda: defaultdict(CellStats)
    )
    overall: dict[str, CellStats] = field(default_factory=lambda: defaultdict(CellStats))

    def strategies(self) -> list[str]:
        return sorted(self.overall)

    def grid(self, strategy: str, contraposition: bool) -> dict[CellKey, float]:
        return {
            key: stats.accuracy
            for key, stats in self.cells[(strategy, contraposition)].items()
            if stats.n > 0
        }

    def delta_grid(self, strategy: str, contraposition: bool,
                   baseline: str = Strategy.NONE.value) -> dict[CellKey, float]:
        """Accuracy deltas vs. a baseline strategy; only cells present in both."""
        ours = self.grid(strategy, contraposition)
        base = self.grid(baseline, contraposition)
        return {key: ours[key] - base[key] for key in ours if key in base}

    def unnegated_fact_delta(self, strategy: str) -> float:
        """Accuracy on unnegated-fact items minus accuracy on all items."""
        return self.unnegated_fact[strategy].accuracy - self.overall[strategy].accuracy


def evaluate_run(predictions: Iterable[ScoredPrediction],
                 items: Sequence[TaskItem] | Mapping[str, TaskItem]) -> AccuracyGrid:
    if not isinstance(items, Mapping):
        items = {item.item_id: item for item in items}
    grid = AccuracyGrid()
    for pred in predictions:
        item = items[pred.item_id]
        strategy = pred.strategy.value
        cell = grid.cells[(strategy, item.contraposition)][
            (item.effective_distraction, item.depth)
        ]
        if pred.skipped:
            cell.skipped += 1
            continue
        cell.n += 1
        cell.correct += int(pred.correct)
        grid.overall[strategy].n += 1
        grid.overall[strategy].correct += int(pred.correct)
        if item.problem.fact.polarity:
            grid.unnegated_fact[strategy].n += 1
            grid.unnegated_fact[strategy].correct += int(pred.correct)
    return grid
