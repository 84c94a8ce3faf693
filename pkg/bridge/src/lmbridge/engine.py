"""Model engines behind the bridge endpoints.

NgramEngine is a self-contained deterministic character model: next-char
distributions are derived from a hash of the recent context, so it needs
no weights, is byte-reproducible across machines, and its continuation
log-probabilities are exactly additive over splits. It exists so the
service and its protocol can be exercised hermetically; for real runs use
HFEngine (see hf_engine.py) with a pretrained causal LM.
"""

from __future__ import annotations

import hashlib
import math
import random
import string
import zlib
from dataclasses import dataclass, field
from typing import Protocol, Sequence

MODES = ("nucleus", "beam")

_ALPHABET = tuple(sorted(set(
    string.ascii_lowercase + string.ascii_uppercase + string.digits
    + " .,!?'\n\"-:;"
)))
_UNKNOWN = "?"
_CONTEXT_CHARS = 8
_TEMPERATURE = 4.0


class Engine(Protocol):
    def generate(self, prompt: str, mode: str, top_p: float, beam_width: int,
                 max_new_tokens: int, seed: int) -> str: ...
    def score(self, prompt: str, continuation: str) -> float: ...


def _norm_char(ch: str) -> str:
    return ch if ch in _ALPHABET else _UNKNOWN


@dataclass
class NgramEngine:
    """Deterministic hashed character model."""

    max_tokens_cap: int = 400
    _cache: dict = field(default_factory=dict, repr=False)

    def _log_probs(self, context: str) -> dict[str, float]:
        key = "".join(_norm_char(c) for c in context[-_CONTEXT_CHARS:])
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        logits = {}
        for ch in _ALPHABET:
            digest = hashlib.sha1(f"{key}\x00{ch}".encode("utf-8")).digest()
            u = int.from_bytes(digest[:8], "big") / 2 ** 64
            logits[ch] = _TEMPERATURE * u
        m = max(logits.values())
        z = math.log(sum(math.exp(v - m) for v in logits.values())) + m
        out = {ch: v - z for ch, v in logits.items()}
        if len(self._cache) < 100_000:
            self._cache[key] = out
        return out

    def score(self, prompt: str, continuation: str) -> float:
        if not prompt or not continuation:
            raise ValueError("prompt and continuation must be non-empty")
        context = prompt
        total = 0.0
        for ch in continuation:
            total += self._log_probs(context)[_norm_char(ch)]
            context += ch
        return total

    def generate(self, prompt: str, mode: str, top_p: float, beam_width: int,
                 max_new_tokens: int, seed: int) -> str:
        if mode not in MODES:
            raise ValueError(f"unknown decoding mode {mode!r}")
        if not prompt:
            raise ValueError("empty prompt")
        steps = max(1, min(int(max_new_tokens), self.max_tokens_cap))
        if mode == "nucleus":
            return self._nucleus(prompt, top_p, steps, seed)
        return self._beam(prompt, beam_width, steps)

    def _nucleus(self, prompt: str, top_p: float, steps: int, seed: int) -> str:
        if not 0.0 < top_p <= 1.0:
            raise ValueError(f"top_p {top_p} outside (0, 1]")
        rng = random.Random(seed ^ zlib.crc32(prompt.encode("utf-8")))
        out = []
        context = prompt
        for _ in range(steps):
            lp = self._log_probs(context)
            ranked = sorted(lp.items(), key=lambda kv: (-kv[1], kv[0]))
            kept, mass = [], 0.0
            for ch, v in ranked:
                kept.append((ch, math.exp(v)))
                mass += math.exp(v)
                if mass >= top_p:
                    break
            ch = rng.choices([c for c, _ in kept], [w for _, w in kept])[0]
            out.append(ch)
            context += ch
        return "".join(out)

    def _beam(self, prompt: str, beam_width: int, steps: int) -> str:
        if beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        beams: list[tuple[float, str]] = [(0.0, "")]
        for _ in range(steps):
            grown = []
            for score, text in beams:
                lp = self._log_probs(prompt + text)
                best = sorted(lp.items(), key=lambda kv: (-kv[1], kv[0]))
                for ch, v in best[:beam_width]:
                    grown.append((score + v, text + ch))
            grown.sort(key=lambda sv: (-sv[0], sv[1]))
            beams = grown[:beam_width]
        return beams[0][1]


@dataclass
class HashedEmbedder:
    """Hashed bag of unigrams and bigrams, L2-normalized. Deterministic and
    weight-free; stands in for a sentence encoder."""

    dimension: int = 384

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            raise ValueError("no texts to embed")
        out = []
        for text in texts:
            tokens = [t for t in
                      "".join(c.lower() if c.isalnum() else " " for c in text).split()]
            grams = tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
            vec = [0.0] * self.dimension
            for g in grams:
                digest = hashlib.sha1(g.encode("utf-8")).digest()
                vec[int.from_bytes(digest[:4], "big") % self.dimension] += 1.0
            norm = math.sqrt(sum(v * v for v in vec))
            if norm > 0:
                vec = [v / norm for v in vec]
            out.append(vec)
        return out
