"""Text-generation backends: a deterministic heuristic mock, an HTTP client
for a remote model server, and a dependency-free hashed-ngram embedder.

The mock model implements the frequency heuristic observed in answer
prediction: it scores a continuation by how often its predicate occurs in the
prompt with matching polarity, and generates assertions of high-frequency
rule consequents.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import requests

from . import cnl
from .lexicon import Lexicon
from .logic import Literal, Rule

MODE_NUCLEUS = "nucleus"
MODE_BEAM = "beam"


@dataclass(frozen=True)
class DecodingPolicy:
    mode: str = MODE_NUCLEUS
    top_p: float = 0.5
    beam_width: int = 5
    max_new_tokens: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (MODE_NUCLEUS, MODE_BEAM):
            raise ValueError(f"unknown decoding mode {self.mode!r}")
        if self.mode == MODE_NUCLEUS and not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p {self.top_p} outside (0, 1]")
        if self.mode == MODE_BEAM and self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")

    def with_seed(self, seed: int) -> "DecodingPolicy":
        return DecodingPolicy(self.mode, self.top_p, self.beam_width,
                              self.max_new_tokens, seed)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    policy: DecodingPolicy

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("empty prompt")


class Backend(Protocol):
    def generate(self, req: GenerationRequest) -> str: ...
    def score_continuation(self, prompt: str, continuation: str) -> float: ...


class TransportError(RuntimeError):
    pass


# --- token counting ------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def count_occurrences(tokens: Sequence[str], surface: str, polarity: bool) -> int:
    """Occurrences of a predicate surface in a token stream.

    An occurrence counts as negated iff the token immediately before the
    surface's first token is "not"; polarity selects which kind is counted.
    """
    needle = tokenize(surface)
    if not needle:
        return 0
    n = len(needle)
    hits = 0
    for i in range(len(tokens) - n + 1):
        if list(tokens[i:i + n]) == needle:
            negated = i > 0 and tokens[i - 1] == "not"
            if negated != polarity:
                hits += 1
    return hits


def mock_heuristic_choice(prompt: str, answers: Sequence[str], lexicon: Lexicon) -> int:
    """Index of the answer whose predicate occurs most often in the prompt
    (polarity-matched); ties go to the lowest index."""
    if not answers:
        raise ValueError("no answers")
    tokens = tokenize(prompt)
    best, best_count = 0, -1
    for i, answer in enumerate(answers):
        parsed = cnl.parse_statement(answer, lexicon)
        if isinstance(parsed, Literal):
            count = count_occurrences(tokens, parsed.predicate.surface, parsed.polarity)
        else:
            count = 0
        if count > best_count:
            best, best_count = i, count
    return best


# --- mock model ----------------------------------------------------------

_QUESTION_RE = re.compile(
    r"does this mean that (\w+) (is [^,?]+), (is [^,?]+), or (is [^,?]+)\?",
    re.IGNORECASE,
)
_DANGLING_RE = re.compile(r"(?:^|[.!?]\s+)Therefore,\s+(\w+)\s*$")


@dataclass
class MockBackend:
    """Deterministic stand-in model implementing the frequency heuristic.

    score_continuation is an affine function of the polarity-matched
    occurrence count; generation asserts the most frequent rule consequent
    not yet stated about the subject.
    """

    lexicon: Lexicon
    kappa: float = 1.0
    c0: float = -10.0

    def score_continuation(self, prompt: str, continuation: str) -> float:
        if not prompt or not continuation:
            raise ValueError("prompt and continuation must be non-empty")
        parsed = cnl.parse_statement(continuation, self.lexicon)
        if not isinstance(parsed, Literal):
            return self.c0
        count = count_occurrences(
            tokenize(prompt), parsed.predicate.surface, parsed.polarity
        )
        return self.kappa * count + self.c0

    def generate(self, req: GenerationRequest) -> str:
        prompt = req.prompt
        dangling = _DANGLING_RE.search(prompt)
        subject = dangling.group(1) if dangling else None

        # consequent frequency and recency over parsed rules
        counts: dict[tuple, int] = {}
        last_pos: dict[tuple, int] = {}
        asserted: set[tuple] = set()
        for pos, sent in enumerate(cnl.split_sentences(prompt)):
            parsed = cnl.parse_statement(sent, self.lexicon)
            if isinstance(parsed, Rule):
                key = parsed.consequent
                counts[key] = counts.get(key, 0) + 1
                last_pos[key] = pos
            elif isinstance(parsed, Literal):
                asserted.add(parsed.key())
                if subject is None:
                    subject = parsed.subject

        answer_rank: dict[tuple, int] = {}
        qm = _QUESTION_RE.search(prompt)
        if qm:
            if subject is None:
                subject = qm.group(1)
            for i, phrase in enumerate((qm.group(2), qm.group(3), qm.group(4))):
                parsed = cnl.parse_statement(f"{qm.group(1)} {phrase}.", self.lexicon)
                if isinstance(parsed, Literal):
                    answer_rank.setdefault(parsed.key(), i)
                    counts.setdefault(parsed.key(), 0)
                    last_pos.setdefault(parsed.key(), -1)

        if not counts or subject is None:
            return ""

        # frequency first; ties broken by answer-set order, then recency
        def rank(key):
            return (-counts[key], answer_rank.get(key, len(answer_rank)),
                    -last_pos[key])

        n_sentences = max(1, min(6, req.policy.max_new_tokens // 15))
        pieces: list[str] = []
        for i in range(n_sentences):
            ranked = sorted(counts, key=rank)
            pick = next((k for k in ranked if k not in asserted), ranked[0])
            asserted.add(pick)
            phrase = f"is {'' if pick[1] else 'not '}{pick[0].surface}."
            if dangling and i == 0:
                pieces.append(f" {phrase}")
            else:
                pieces.append(f"{subject} {phrase}")
        return " ".join(pieces).rstrip()


# --- fallback embedder ---------------------------------------------------

@dataclass
class FallbackEmbedder:
    """Hashed bag of within-sentence unigrams and bigrams, L2-normalized.

    Deterministic and dependency-free; repeating a text scales the raw
    counts, so cosine similarity of a text to its own repetition is 1.
    """

    dimension: int = 512

    def _bucket(self, ngram: str) -> int:
        digest = hashlib.sha1(ngram.encode("utf-8")).digest()
        return int.from_bytes(digest[:4], "big") % self.dimension

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            raise ValueError("no texts to embed")
        out = []
        for text in texts:
            vec = [0.0] * self.dimension
            for sent in cnl.split_sentences(text.strip()):
                tokens = tokenize(sent)
                grams = tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
                for g in grams:
                    vec[self._bucket(g)] += 1.0
            norm = math.sqrt(sum(v * v for v in vec))
            if norm > 0:
                vec = [v / norm for v in vec]
            out.append(vec)
        return out


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        return 0.0
    return dot / (nu * nv)


# --- HTTP client ---------------------------------------------------------

@dataclass
class HttpBackend:
    """Client for the generation/scoring/embedding wire protocol."""

    base_url: str
    retries: int = 3
    timeout: float = 60.0
    session: requests.Session = field(default_factory=requests.Session)

    def _post(self, path: str, payload: dict) -> dict:
        url = self.base_url.rstrip("/") + path
        last_error: Exception | None = None
        for _attempt in range(self.retries + 1):
            try:
                resp = self.session.post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code != 200:
                try:
                    detail = resp.json().get("error", resp.text)
                except ValueError:
                    detail = resp.text
                last_error = TransportError(f"{url} -> {resp.status_code}: {detail}")
                continue
            try:
                return resp.json()
            except ValueError as exc:
                last_error = exc
                continue
        raise TransportError(
            f"{url} failed after {self.retries + 1} attempts: {last_error}"
        )

    def generate(self, req: GenerationRequest) -> str:
        payload = {
            "prompt": req.prompt,
            "mode": req.policy.mode,
            "top_p": req.policy.top_p,
            "beam_width": req.policy.beam_width,
            "max_new_tokens": req.policy.max_new_tokens,
            "seed": req.policy.seed,
        }
        reply = self._post("/generate", payload)
        if "text" not in reply:
            raise TransportError(f"malformed /generate reply: {reply}")
        return reply["text"]

    def score_continuation(self, prompt: str, continuation: str) -> float:
        reply = self._post("/score", {"prompt": prompt, "continuation": continuation})
        if "logprob" not in reply:
            raise TransportError(f"malformed /score reply: {reply}")
        return float(reply["logprob"])

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        reply = self._post("/embed", {"texts": list(texts)})
        if "vectors" not in reply:
            raise TransportError(f"malformed /embed reply: {reply}")
        return reply["vectors"]
