"""Sampling of balanced rule-chain task datasets.

Each problem links a fact through a chain of conditionals to a conclusion
drawn from a complementary predicate pair, plus confounding rules whose
consequents point at the conclusion predicate or its complement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import cnl
from .lexicon import Lexicon
from .logic import (
    FormalProblem,
    Literal,
    Predicate,
    Rule,
    Statement,
    derive_chain,
    effective_distraction,
    is_consistent,
    transpose,
)


class GenerationError(RuntimeError):
    pass


CONTRAPOSITION_MODES = ("only-true", "only-false", "both")


@dataclass(frozen=True)
class GenerationSpec:
    depth_range: tuple[int, int] = (1, 5)
    breadth_range: tuple[int, int] = (0, 5)
    contraposition: str = "both"
    items_per_cell: int = 10
    seed: int = 0
    fact_negation_rate: float = 0.5
    conclusion_negation_rate: float = 0.5
    intermediary_negation_rate: float = 0.0
    scrambled: bool = False

    def __post_init__(self):
        if self.depth_range[0] > self.depth_range[1] or self.depth_range[0] < 1:
            raise ValueError(f"bad depth range {self.depth_range}")
        if self.breadth_range[0] > self.breadth_range[1] or self.breadth_range[0] < 0:
            raise ValueError(f"bad breadth range {self.breadth_range}")
        if self.contraposition not in CONTRAPOSITION_MODES:
            raise ValueError(f"bad contraposition mode {self.contraposition!r}")
        for rate in (self.fact_negation_rate, self.conclusion_negation_rate,
                     self.intermediary_negation_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"rate {rate} outside [0,1]")

    def contraposition_flags(self) -> tuple[bool, ...]:
        return {"only-true": (True,), "only-false": (False,), "both": (False, True)}[
            self.contraposition
        ]


@dataclass(frozen=True)
class TaskItem:
    """A rendered task instance: context sentences, answers, and metadata."""

    item_id: str
    problem: FormalProblem
    subject: str
    context_statements: tuple[Statement, ...]
    context: tuple[str, ...]
    answers: tuple[str, str, str]  # conclusion, its negation, its complement
    answer_literals: tuple[Literal, Literal, Literal]
    effective_distraction: int

    @property
    def context_text(self) -> str:
        return " ".join(self.context)

    @property
    def depth(self) -> int:
        return self.problem.depth

    @property
    def breadth(self) -> int:
        return self.problem.breadth

    @property
    def contraposition(self) -> bool:
        return self.problem.contraposition


def build_answer_set(conclusion: Literal, lexicon: Lexicon) -> tuple[Literal, Literal, Literal]:
    """Return (conclusion, logical negation, conceptual contradiction)."""
    comp = lexicon.complement_of(conclusion.predicate)
    if comp is None:
        raise GenerationError(
            f"predicate {conclusion.predicate.surface!r} has no registered complement"
        )
    alt1 = conclusion.negate()
    alt2 = Literal(conclusion.subject, comp, conclusion.polarity)
    return conclusion, alt1, alt2


def sample_problem(
    depth: int,
    breadth: int,
    contraposition: bool,
    lexicon: Lexicon,
    rng: random.Random,
    fact_negated: bool = False,
    conclusion_negated: bool = False,
    intermediary_negation_rate: float = 0.0,
) -> FormalProblem:
    if depth < 1:
        raise GenerationError("depth must be >= 1")
    if len(lexicon.free_predicates) < depth + breadth:
        raise GenerationError(
            f"lexicon has {len(lexicon.free_predicates)} free predicates, "
            f"need {depth + breadth} for depth {depth} breadth {breadth}"
        )
    if not lexicon.pairs:
        raise GenerationError("lexicon has no complement pairs")

    for _ in range(100):
        subject = rng.choice(lexicon.names)
        pair = rng.choice(lexicon.pairs)
        target, complement = pair if rng.random() < 0.5 else (pair[1], pair[0])
        free = rng.sample(lexicon.free_predicates, depth + breadth)
        chain_preds = list(free[:depth]) + [target]  # F, I1..I_{l-1}, G

        polarities = [not fact_negated]
        for _i in range(depth - 1):
            polarities.append(not (rng.random() < intermediary_negation_rate))
        polarities.append(not conclusion_negated)

        chain = tuple(
            Rule((chain_preds[i], polarities[i]), (chain_preds[i + 1], polarities[i + 1]))
            for i in range(depth)
        )
        if contraposition:
            chain = chain[:-1] + (transpose(chain[-1]),)

        consequent_pool = [
            (target, True), (target, False), (complement, True), (complement, False),
        ]
        distractors = tuple(
            Rule((pred, True), rng.choice(consequent_pool)) for pred in free[depth:]
        )

        fact = Literal(subject, chain_preds[0], polarities[0])
        conclusion = Literal(subject, target, polarities[-1])
        _, alt1, alt2 = build_answer_set(conclusion, lexicon)

        tags = []
        chain_keys = {r.antecedent for r in chain} | {r.consequent for r in chain}
        if any(d.consequent in chain_keys for d in distractors):
            tags.append("distractor-overlaps-chain")

        problem = FormalProblem(
            fact=fact,
            chain=chain,
            distractors=distractors,
            conclusion=conclusion,
            alternatives=(alt1, alt2),
            contraposition=contraposition,
            depth=depth,
            breadth=breadth,
            tags=tuple(tags),
        )
        if not is_consistent(fact, problem.rules, lexicon):
            continue  # resample; the closure contradicts itself
        derived = derive_chain(fact, chain)
        assert derived and derived[-1] == conclusion
        return problem
    raise GenerationError("could not sample a consistent problem in 100 attempts")


def compose_context(problem: FormalProblem, rng: random.Random) -> tuple[Statement, ...]:
    """Uniformly random permutation of fact, chain rules, and distractors."""
    statements = list(problem.statements)
    rng.shuffle(statements)
    return tuple(statements)


def make_item(item_id: str, problem: FormalProblem, lexicon: Lexicon,
              rng: random.Random) -> TaskItem:
    statements = compose_context(problem, rng)
    answers = (problem.conclusion,) + problem.alternatives
    return TaskItem(
        item_id=item_id,
        problem=problem,
        subject=problem.fact.subject,
        context_statements=statements,
        context=tuple(cnl.render_statement(s) for s in statements),
        answers=tuple(cnl.render_statement(a) for a in answers),
        answer_literals=answers,
        effective_distraction=effective_distraction(problem),
    )


def _cell_seed(seed: int, depth: int, breadth: int, contraposition: bool) -> int:
    return seed ^ (depth << 24) ^ (breadth << 16) ^ (int(contraposition) << 8)


def generate_dataset(spec: GenerationSpec, lexicon: Lexicon) -> list[TaskItem]:
    """items_per_cell items for every (depth, breadth, contraposition) cell."""
    items: list[TaskItem] = []
    for depth in range(spec.depth_range[0], spec.depth_range[1] + 1):
        for breadth in range(spec.breadth_range[0], spec.breadth_range[1] + 1):
            for contraposition in spec.contraposition_flags():
                rng = random.Random(_cell_seed(spec.seed, depth, breadth, contraposition))
                for i in range(spec.items_per_cell):
                    problem = sample_problem(
                        depth, breadth, contraposition, lexicon, rng,
                        fact_negated=rng.random() < spec.fact_negation_rate,
                        conclusion_negated=rng.random() < spec.conclusion_negation_rate,
                        intermediary_negation_rate=spec.intermediary_negation_rate,
                    )
                    if spec.scrambled:
                        problem = scramble_antecedents(problem, lexicon, rng)
                    item_id = f"d{depth}b{breadth}c{int(contraposition)}-{i:05d}"
                    items.append(make_item(item_id, problem, lexicon, rng))
    return items


def scramble_antecedents(problem: FormalProblem, lexicon: Lexicon,
                         rng: random.Random) -> FormalProblem:
    """Control condition: replace every rule antecedent with a fresh predicate.

    Consequents, fact and answers are untouched; the conclusion is no longer
    derivable.
    """
    used = {problem.fact.predicate}
    for r in problem.rules:
        used.add(r.antecedent[0])
        used.add(r.consequent[0])
    fresh_pool = [p for p in lexicon.free_predicates if p not in used]
    n_rules = len(problem.rules)
    if len(fresh_pool) < n_rules:
        raise GenerationError(
            f"lexicon exhausted: need {n_rules} fresh predicates, have {len(fresh_pool)}"
        )
    fresh = rng.sample(fresh_pool, n_rules)

    def swap(rule: Rule, pred: Predicate) -> Rule:
        return Rule((pred, rule.antecedent[1]), rule.consequent)

    chain = tuple(swap(r, p) for r, p in zip(problem.chain, fresh[: problem.depth]))
    distractors = tuple(
        swap(r, p) for r, p in zip(problem.distractors, fresh[problem.depth:])
    )
    return FormalProblem(
        fact=problem.fact,
        chain=chain,
        distractors=distractors,
        conclusion=problem.conclusion,
        alternatives=problem.alternatives,
        contraposition=problem.contraposition,
        depth=problem.depth,
        breadth=problem.breadth,
        scrambled=True,
        tags=problem.tags + ("scrambled",),
    )
