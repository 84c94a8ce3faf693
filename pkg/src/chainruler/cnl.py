"""Controlled-English surface layer: rendering, parsing, sentence splitting.

Only two templates exist: "<Name> is [not] <pred>." for singular statements
and "If someone is [not] <A>, then they are [not] <B>." for conditionals.
Rendering and parsing are exact inverses over a lexicon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lexicon import Lexicon
from .logic import Literal, Predicate, Rule, Statement


@dataclass(frozen=True)
class ParseFailure:
    reason: str  # unknown template | unknown predicate | unknown subject
    text: str


def _phrase(polarity: bool, surface: str) -> str:
    return f"{'' if polarity else 'not '}{surface}"


def render_statement(stmt: Statement) -> str:
    if isinstance(stmt, Literal):
        return f"{stmt.subject} is {_phrase(stmt.polarity, stmt.predicate.surface)}."
    (a, ap), (c, cp) = stmt.antecedent, stmt.consequent
    return (
        f"If someone is {_phrase(ap, a.surface)}, "
        f"then they are {_phrase(cp, c.surface)}."
    )


def predicate_phrase(lit: Literal) -> str:
    """The predicate part of a literal, e.g. "is not generous"."""
    return f"is {_phrase(lit.polarity, lit.predicate.surface)}"


_RULE_RE = re.compile(
    r"^if someone is (not )?(.+?), then they are (not )?(.+)$", re.IGNORECASE
)
_LITERAL_RE = re.compile(r"^(\S+) is (not )?(.+)$")


def parse_statement(sentence: str, lexicon: Lexicon) -> Statement | ParseFailure:
    """Inverse of render_statement; never raises on unparseable input."""
    text = sentence.strip()
    text = re.sub(r"[.!?]+$", "", text).strip()
    if not text:
        return ParseFailure("unknown template", sentence)

    m = _RULE_RE.match(text)
    if m:
        a = lexicon.predicate(m.group(2).strip())
        c = lexicon.predicate(m.group(4).strip())
        if a is None or c is None:
            return ParseFailure("unknown predicate", sentence)
        try:
            return Rule((a, m.group(1) is None), (c, m.group(3) is None))
        except ValueError:
            return ParseFailure("unknown template", sentence)

    m = _LITERAL_RE.match(text)
    if m:
        subject = m.group(1)
        if not lexicon.has_name(subject):
            # tolerate a lowercased first word from mid-text parses
            cap = subject.capitalize()
            if not lexicon.has_name(cap):
                return ParseFailure("unknown subject", sentence)
            subject = cap
        pred = lexicon.predicate(m.group(3).strip())
        if pred is None:
            return ParseFailure("unknown predicate", sentence)
        return Literal(subject, pred, m.group(2) is None)

    return ParseFailure("unknown template", sentence)


_TERMINALS = ".!?"


def split_sentences(text: str, n: int | None = None) -> list[str]:
    """Split on terminal punctuation, keeping quoted material within one sentence.

    An unclosed double quote binds the rest of the text to the current
    sentence. Returns at most n sentences when n is given.
    """
    sentences: list[str] = []
    buf: list[str] = []
    in_quote = False
    i = 0
    while i < len(text):
        ch = text[i]
        buf.append(ch)
        if ch == '"':
            in_quote = not in_quote
        elif ch in _TERMINALS and not in_quote:
            # consume trailing terminals and a closing quote
            while i + 1 < len(text) and text[i + 1] in _TERMINALS + '"':
                i += 1
                buf.append(text[i])
            sent = "".join(buf).strip()
            if sent:
                sentences.append(sent)
            buf = []
            if n is not None and len(sentences) >= n:
                return sentences
        i += 1
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences if n is None else sentences[:n]
