"""Hand-encoded reference task items used in tests and `gen --fixtures`."""

from __future__ import annotations

from . import cnl
from .generator import TaskItem, build_answer_set
from .lexicon import Lexicon, default_lexicon
from .logic import FormalProblem, Literal, Rule, effective_distraction


def _pred(lexicon: Lexicon, surface: str):
    pred = lexicon.predicate(surface)
    assert pred is not None, surface
    return pred


def jill_item(lexicon: Lexicon | None = None) -> TaskItem:
    """Depth-2 item: Jill is green => loud => guilty, one distractor."""
    lex = lexicon or default_lexicon()
    green, loud, guilty = (_pred(lex, s) for s in ("green", "loud", "guilty"))
    empty, innocent = _pred(lex, "empty"), _pred(lex, "innocent")
    fact = Literal("Jill", green)
    chain = (Rule((green, True), (loud, True)), Rule((loud, True), (guilty, True)))
    distractors = (Rule((empty, True), (innocent, True)),)
    conclusion = Literal("Jill", guilty)
    _, alt1, alt2 = build_answer_set(conclusion, lex)
    problem = FormalProblem(fact, chain, distractors, conclusion, (alt1, alt2),
                            contraposition=False, depth=2, breadth=1)
    statements = (distractors[0], chain[0], chain[1], fact)
    return TaskItem(
        item_id="fixture-jill",
        problem=problem,
        subject="Jill",
        context_statements=statements,
        context=tuple(cnl.render_statement(s) for s in statements),
        answers=tuple(cnl.render_statement(a) for a in (conclusion, alt1, alt2)),
        answer_literals=(conclusion, alt1, alt2),
        effective_distraction=effective_distraction(problem),
    )


def lily_item(lexicon: Lexicon | None = None) -> TaskItem:
    """Depth-3 contraposition item: Lily is blue => careful => loud => generous."""
    lex = lexicon or default_lexicon()
    blue, careful, loud = (_pred(lex, s) for s in ("blue", "careful", "loud"))
    generous, guilty = _pred(lex, "generous"), _pred(lex, "guilty")
    money = _pred(lex, "in need of money")
    fact = Literal("Lily", blue)
    chain = (
        Rule((blue, True), (careful, True)),
        Rule((careful, True), (loud, True)),
        Rule((generous, False), (loud, False)),  # transposed last link
    )
    distractors = (
        Rule((money, True), (generous, False)),
        Rule((guilty, True), (generous, False)),
    )
    conclusion = Literal("Lily", generous)
    _, alt1, alt2 = build_answer_set(conclusion, lex)
    problem = FormalProblem(fact, chain, distractors, conclusion, (alt1, alt2),
                            contraposition=True, depth=3, breadth=2)
    statements = (chain[2], chain[0], fact, distractors[0], distractors[1], chain[1])
    return TaskItem(
        item_id="fixture-lily",
        problem=problem,
        subject="Lily",
        context_statements=statements,
        context=tuple(cnl.render_statement(s) for s in statements),
        answers=tuple(cnl.render_statement(a) for a in (conclusion, alt1, alt2)),
        answer_literals=(conclusion, alt1, alt2),
        effective_distraction=effective_distraction(problem),
    )


def fixture_items(lexicon: Lexicon | None = None) -> list[TaskItem]:
    lex = lexicon or default_lexicon()
    return [jill_item(lex), lily_item(lex)]
