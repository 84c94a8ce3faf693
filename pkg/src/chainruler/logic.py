"""Symbolic problem representation and the deduction engine.

Problems are chains of single-antecedent conditionals over unary predicates.
The engine applies rules in both the direct (modus ponens) and contrapositive
(modus tollens) direction, and bridges between conceptually complementary
predicates registered in a lexicon.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Union

if TYPE_CHECKING:
    from .lexicon import Lexicon


@dataclass(frozen=True)
class Predicate:
    """A unary predicate identified by its (possibly multiword) surface form."""

    surface: str

    def __post_init__(self):
        if not self.surface or any(ch in self.surface for ch in ".!?,"):
            raise ValueError(f"bad predicate surface: {self.surface!r}")

    def __repr__(self):
        return f"Predicate({self.surface!r})"


@dataclass(frozen=True)
class Literal:
    """A singular statement: <subject> is [not] <predicate>."""

    subject: str
    predicate: Predicate
    polarity: bool = True

    def negate(self) -> "Literal":
        return replace(self, polarity=not self.polarity)

    def key(self) -> tuple[Predicate, bool]:
        return (self.predicate, self.polarity)


@dataclass(frozen=True)
class Rule:
    """A generalized conditional: if someone is [not] A, then they are [not] B."""

    antecedent: tuple[Predicate, bool]
    consequent: tuple[Predicate, bool]

    def __post_init__(self):
        if self.antecedent == self.consequent:
            raise ValueError("rule must not be a self-loop")


Statement = Union[Literal, Rule]


@dataclass(frozen=True)
class FormalProblem:
    """A complete task instance before rendering to natural language."""

    fact: Literal
    chain: tuple[Rule, ...]
    distractors: tuple[Rule, ...]
    conclusion: Literal
    alternatives: tuple[Literal, Literal]
    contraposition: bool
    depth: int
    breadth: int
    scrambled: bool = False
    # True when a distractor consequent coincides with a usable inference step
    # (kept, but tagged, since sampling is unfiltered).
    tags: tuple[str, ...] = field(default=())

    @property
    def rules(self) -> tuple[Rule, ...]:
        return self.chain + self.distractors

    @property
    def statements(self) -> tuple[Statement, ...]:
        return (self.fact,) + self.chain + self.distractors


def transpose(rule: Rule) -> Rule:
    """Contrapositive of a rule: swap antecedent/consequent, flip both polarities."""
    (a, ap), (c, cp) = rule.antecedent, rule.consequent
    return Rule(antecedent=(c, not cp), consequent=(a, not ap))


def _apply(rule: Rule, lit: Literal) -> Literal | None:
    """One inference step: modus ponens, or modus tollens via the contrapositive."""
    (a, ap), (c, cp) = rule.antecedent, rule.consequent
    if lit.predicate == a and lit.polarity == ap:
        return Literal(lit.subject, c, cp)
    if lit.predicate == c and lit.polarity != cp:
        return Literal(lit.subject, a, not ap)
    return None


def derive_chain(fact: Literal, chain: Iterable[Rule]) -> list[Literal]:
    """Walk the rule chain from the fact, returning the intermediary conclusions.

    Returns an empty list if some link cannot be applied to the literal
    derived so far (in either direction).
    """
    derived: list[Literal] = []
    current = fact
    for rule in chain:
        nxt = _apply(rule, current)
        if nxt is None:
            return []
        derived.append(nxt)
        current = nxt
    return derived


def closure(fact: Literal, rules: Iterable[Rule], lexicon: "Lexicon") -> set[Literal]:
    """Fixed point of {fact} under both rule directions and complement bridging.

    Complement pairs are treated as mutually exclusive and jointly exhaustive,
    so "a is B̄" yields "a is not B" and "a is not B̄" yields "a is B".
    """
    rules = tuple(rules)
    known: set[Literal] = set()
    frontier = [fact]
    while frontier:
        lit = frontier.pop()
        if lit in known:
            continue
        known.add(lit)
        comp = lexicon.complement_of(lit.predicate)
        if comp is not None:
            frontier.append(Literal(lit.subject, comp, not lit.polarity))
        for rule in rules:
            nxt = _apply(rule, lit)
            if nxt is not None:
                frontier.append(nxt)
    return known


def is_consistent(fact: Literal, rules: Iterable[Rule], lexicon: "Lexicon") -> bool:
    cl = closure(fact, rules, lexicon)
    return not any(lit.negate() in cl for lit in cl)


def effective_distraction(problem: FormalProblem) -> int:
    """Number of distractors whose consequent differs from the conclusion's
    (predicate, polarity) pair."""
    target = problem.conclusion.key()
    return sum(1 for d in problem.distractors if d.consequent != target)


EXPLICIT = "explicit"
IMPLICIT = "implicit"
INCONSISTENT = "inconsistent"
INDEPENDENT = "independent"


def classify_statement(stmt: Statement, problem: FormalProblem, lexicon: "Lexicon") -> str:
    """Relate a parsed statement to the problem context.

    explicit: appears verbatim among the context statements; implicit:
    entailed but not explicit; inconsistent: its negation is entailed;
    independent: none of the above.
    """
    if stmt in problem.statements:
        return EXPLICIT
    if isinstance(stmt, Literal):
        cl = closure(problem.fact, problem.rules, lexicon)
        if stmt in cl:
            return IMPLICIT
        if stmt.negate() in cl:
            return INCONSISTENT
        return INDEPENDENT
    # Rules: test hypothetically, assuming the antecedent about a fresh subject.
    hypo = Literal("_someone", *stmt.antecedent)
    cl = closure(hypo, problem.rules, lexicon)
    consequent = Literal("_someone", *stmt.consequent)
    if consequent in cl:
        return IMPLICIT
    if consequent.negate() in cl:
        return INCONSISTENT
    return INDEPENDENT
