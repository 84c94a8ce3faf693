"""Dynamic context-expansion strategies, baselines, and oracles.

Six generated strategies (free, three fewshot variants, structured,
recursive) plus four synthetic expansions assembled directly from the task
data. Each strategy yields an ElaborationRecord whose full_text is what gets
appended to the context before answer scoring.
"""

from __future__ import annotations

import enum
import random
import zlib
from dataclasses import dataclass
from importlib import resources as importlib_resources

from . import cnl, logic
from .backends import (
    MODE_BEAM,
    MODE_NUCLEUS,
    Backend,
    DecodingPolicy,
    GenerationRequest,
)
from .generator import TaskItem
from .lexicon import Lexicon


class Strategy(str, enum.Enum):
    NONE = "none"
    FREE = "free"
    FEWSHOT_IC = "fewshot_ic"
    FEWSHOT_PC = "fewshot_pc"
    FEWSHOT_PCIC = "fewshot_pcic"
    STRUCTURED = "structured"
    RECURSIVE = "recursive"
    BASELINE_ANSWERS = "baseline_answers"
    BASELINE_CONTEXT = "baseline_context"
    ORACLE_INTERMEDIARY = "oracle_intermediary"
    ORACLE_FINAL = "oracle_final"


GENERATED_STRATEGIES = (
    Strategy.FREE, Strategy.FEWSHOT_IC, Strategy.FEWSHOT_PC,
    Strategy.FEWSHOT_PCIC, Strategy.STRUCTURED, Strategy.RECURSIVE,
)
SYNTHETIC_STRATEGIES = (
    Strategy.BASELINE_ANSWERS, Strategy.BASELINE_CONTEXT,
    Strategy.ORACLE_INTERMEDIARY, Strategy.ORACLE_FINAL,
)


@dataclass(frozen=True)
class ElaborationRecord:
    item_id: str
    strategy: Strategy
    query: str
    sentences: tuple[str, ...]
    full_text: str
    per_sentence_class: tuple[str, ...]
    decoding: DecodingPolicy | None = None
    degenerate: bool = False


EMPTY_RECORD_QUERY = ""


def empty_record(item_id: str) -> ElaborationRecord:
    return ElaborationRecord(item_id, Strategy.NONE, EMPTY_RECORD_QUERY, (), "", ())


def fewshot_samples(variant: str) -> str:
    """Verbatim sample-solution text for a fewshot variant (ic, pc, pcic)."""
    name = f"fewshot_{variant}.txt"
    path = importlib_resources.files("chainruler.resources").joinpath(name)
    return path.read_text(encoding="utf-8")


def build_question(item: TaskItem) -> str:
    first, second, third = item.answer_literals
    phrases = [
        f"{first.subject} {cnl.predicate_phrase(first)}",
        cnl.predicate_phrase(second),
        cnl.predicate_phrase(third),
    ]
    return f"Does this mean that {phrases[0]}, {phrases[1]}, or {phrases[2]}? Explain!"


def _classify_all(sentences: tuple[str, ...], item: TaskItem,
                  lexicon: Lexicon) -> tuple[str, ...]:
    labels = []
    for sent in sentences:
        parsed = cnl.parse_statement(sent, lexicon)
        if isinstance(parsed, cnl.ParseFailure):
            labels.append(logic.INDEPENDENT)
        else:
            labels.append(logic.classify_statement(parsed, item.problem, lexicon))
    return tuple(labels)


FREE_POLICY = DecodingPolicy(mode=MODE_NUCLEUS, top_p=0.5, max_new_tokens=200)
FEWSHOT_POLICY = DecodingPolicy(mode=MODE_BEAM, beam_width=5, max_new_tokens=200)
STRUCTURED_POLICY = DecodingPolicy(mode=MODE_NUCLEUS, top_p=0.5, max_new_tokens=60)
RECURSIVE_POLICY = DecodingPolicy(mode=MODE_BEAM, beam_width=5, max_new_tokens=60)


def elaborate_free(item: TaskItem, backend: Backend, lexicon: Lexicon,
                   policy: DecodingPolicy = FREE_POLICY) -> ElaborationRecord:
    question = build_question(item)
    query = f"Here is what we know: {item.context_text} {question}"
    completion = backend.generate(GenerationRequest(query, policy))
    sentences = tuple(cnl.split_sentences(completion, 4))
    full_text = f"{question} {' '.join(sentences)}" if sentences else ""
    return ElaborationRecord(
        item_id=item.item_id,
        strategy=Strategy.FREE,
        query=query,
        sentences=sentences,
        full_text=full_text,
        per_sentence_class=_classify_all(sentences, item, lexicon),
        decoding=policy,
        degenerate=len(sentences) < 4,
    )


_FEWSHOT_STRATEGIES = {
    "ic": Strategy.FEWSHOT_IC,
    "pc": Strategy.FEWSHOT_PC,
    "pcic": Strategy.FEWSHOT_PCIC,
}


def _truncate_fewshot(sentences: list[str], cap: int = 5) -> list[str]:
    # stop after the first sentence opening with "Therefore,"; hard cap
    out = []
    for sent in sentences[:cap]:
        out.append(sent)
        if sent.lower().startswith("therefore,"):
            break
    return out


def elaborate_fewshot(item: TaskItem, variant: str, backend: Backend, lexicon: Lexicon,
                      policy: DecodingPolicy = FEWSHOT_POLICY) -> ElaborationRecord:
    if variant not in _FEWSHOT_STRATEGIES:
        raise ValueError(f"unknown fewshot variant {variant!r}")
    question = build_question(item)
    samples = fewshot_samples(variant).strip()
    query = f"{samples}\nHere is what we know: {item.context_text} {question}"
    completion = backend.generate(GenerationRequest(query, policy))
    sentences = tuple(_truncate_fewshot(cnl.split_sentences(completion)))
    full_text = f"{question} {' '.join(sentences)}" if sentences else ""
    return ElaborationRecord(
        item_id=item.item_id,
        strategy=_FEWSHOT_STRATEGIES[variant],
        query=query,
        sentences=sentences,
        full_text=full_text,
        per_sentence_class=_classify_all(sentences, item, lexicon),
        decoding=policy,
        degenerate=not sentences,
    )


def _first_clause(completion: str) -> str | None:
    clauses = cnl.split_sentences(completion, 1)
    if not clauses:
        return None
    clause = clauses[0]
    if clause[-1] not in ".!?":
        clause += "."
    return clause


def _subject_sentence(subject: str, clause: str) -> str:
    text = clause.lstrip()
    if text.lower().startswith(subject.lower() + " "):
        text = text[len(subject) + 1:]
    return f"{subject} {text}"


def _piecemeal_record(item: TaskItem, strategy: Strategy, query: str,
                      sentences: tuple[str, ...], lexicon: Lexicon,
                      policy: DecodingPolicy) -> ElaborationRecord:
    subject = item.subject
    if sentences:
        first_clause = sentences[0][len(subject) + 1:]
        rest = " ".join(sentences[1:])
        full_text = f"Therefore, we may conclude that {subject} {first_clause}"
        if rest:
            full_text = f"{full_text} {rest}"
    else:
        full_text = ""
    return ElaborationRecord(
        item_id=item.item_id,
        strategy=strategy,
        query=query,
        sentences=sentences,
        full_text=full_text,
        per_sentence_class=_classify_all(sentences, item, lexicon),
        decoding=policy,
        degenerate=len(sentences) < 4,
    )


def elaborate_structured(item: TaskItem, backend: Backend, lexicon: Lexicon,
                         policy: DecodingPolicy = STRUCTURED_POLICY) -> ElaborationRecord:
    query = f"Here is what we know: {item.context_text} Therefore, {item.subject}"
    sentences = []
    for offset in range(4):
        completion = backend.generate(
            GenerationRequest(query, policy.with_seed(policy.seed + offset))
        )
        clause = _first_clause(completion)
        if clause is not None:
            sentences.append(_subject_sentence(item.subject, clause))
    return _piecemeal_record(item, Strategy.STRUCTURED, query, tuple(sentences),
                             lexicon, policy)


def elaborate_recursive(item: TaskItem, backend: Backend, lexicon: Lexicon,
                        policy: DecodingPolicy = RECURSIVE_POLICY) -> ElaborationRecord:
    working = list(item.context)
    sentences = []
    query = ""
    for _ in range(4):
        query = f"Here is what we know: {' '.join(working)} Therefore, {item.subject}"
        completion = backend.generate(GenerationRequest(query, policy))
        clause = _first_clause(completion)
        if clause is None:
            break
        sentence = _subject_sentence(item.subject, clause)
        sentences.append(sentence)
        working.append(sentence)
    return _piecemeal_record(item, Strategy.RECURSIVE, query, tuple(sentences),
                             lexicon, policy)


def synthetic_expansion(item: TaskItem, kind: Strategy, lexicon: Lexicon,
                        rng: random.Random) -> ElaborationRecord:
    """Baselines and oracles assembled without any model call."""
    if kind == Strategy.BASELINE_ANSWERS:
        pick = rng.choice(item.answers[1:])  # one of the two false alternatives
        sentences = (pick,) * 4
    elif kind == Strategy.BASELINE_CONTEXT:
        if len(item.context) >= 4:
            sentences = tuple(rng.sample(item.context, 4))
        else:
            sentences = tuple(rng.choices(item.context, k=4))
    elif kind == Strategy.ORACLE_INTERMEDIARY:
        derived = logic.derive_chain(item.problem.fact, item.problem.chain)
        sentences = tuple(cnl.render_statement(lit) for lit in derived)
    elif kind == Strategy.ORACLE_FINAL:
        sentences = (item.answers[0],) * 4
    else:
        raise ValueError(f"{kind} is not a synthetic expansion")
    return ElaborationRecord(
        item_id=item.item_id,
        strategy=kind,
        query="",
        sentences=sentences,
        full_text=" ".join(sentences),
        per_sentence_class=_classify_all(sentences, item, lexicon),
    )


def elaborate_item(item: TaskItem, strategy: Strategy, backend: Backend,
                   lexicon: Lexicon, seed: int = 0) -> ElaborationRecord:
    """Dispatch one item through one strategy with a derived deterministic seed."""
    item_seed = seed ^ zlib.crc32(item.item_id.encode("utf-8"))
    if strategy == Strategy.NONE:
        return empty_record(item.item_id)
    if strategy == Strategy.FREE:
        return elaborate_free(item, backend, lexicon, FREE_POLICY.with_seed(item_seed))
    if strategy in (Strategy.FEWSHOT_IC, Strategy.FEWSHOT_PC, Strategy.FEWSHOT_PCIC):
        variant = strategy.value.removeprefix("fewshot_")
        return elaborate_fewshot(item, variant, backend, lexicon,
                                 FEWSHOT_POLICY.with_seed(item_seed))
    if strategy == Strategy.STRUCTURED:
        return elaborate_structured(item, backend, lexicon,
                                    STRUCTURED_POLICY.with_seed(item_seed))
    if strategy == Strategy.RECURSIVE:
        return elaborate_recursive(item, backend, lexicon,
                                   RECURSIVE_POLICY.with_seed(item_seed))
    return synthetic_expansion(item, strategy, lexicon, random.Random(item_seed))
