"""Analysis quantities: epistemic luck, ideal elaborations, BLEU2,
embedding similarities, redundancy/coherence, and a logistic-regression
fitter for explaining accuracy."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import cnl
from .backends import cosine, count_occurrences, tokenize
from .elaborate import ElaborationRecord, build_question
from .generator import TaskItem
from .logic import FormalProblem, Literal, derive_chain


@dataclass(frozen=True)
class LuckCount:
    context_hits: int
    elaboration_hits: int

    @property
    def total(self) -> int:
        return self.context_hits + self.elaboration_hits


def total_luck(context_text: str, elab_text: str, conclusion: Literal) -> LuckCount:
    """Unnegated occurrences of the conclusion predicate in context and
    elaboration. An occurrence is negated iff its first token is immediately
    preceded by "not"."""
    surface = conclusion.predicate.surface
    ctx = count_occurrences(tokenize(context_text), surface, True)
    elab = count_occurrences(tokenize(elab_text), surface, True) if elab_text else 0
    return LuckCount(ctx, elab)


def ideal_elaborations(problem: FormalProblem, subject: str) -> tuple[str, str]:
    """(perfect proof chain, intermediary-and-final conclusions) as texts."""
    proof = [cnl.render_statement(problem.fact)]
    proof += [cnl.render_statement(r) for r in problem.chain]
    proof.append(cnl.render_statement(problem.conclusion))
    conclusions = [
        cnl.render_statement(lit) for lit in derive_chain(problem.fact, problem.chain)
    ]
    return " ".join(proof), " ".join(conclusions)


# --- BLEU2 ----------------------------------------------------------------

_EPS = 1e-9


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _modified_precision(cand: Sequence[str], ref: Sequence[str], n: int) -> float:
    counts = _ngram_counts(cand, n)
    total = sum(counts.values())
    if total == 0:
        return 1.0  # candidate too short for this order; vacuous
    ref_counts = _ngram_counts(ref, n)
    clipped = sum(min(c, ref_counts[g]) for g, c in counts.items())
    if clipped == 0:
        return _EPS / total
    return clipped / total


def bleu2(candidate: str, reference: str) -> float:
    """Geometric mean of unigram/bigram modified precision with brevity
    penalty; lowercased, punctuation-free tokenization."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand:
        return 0.0
    p1 = _modified_precision(cand, ref, 1)
    p2 = _modified_precision(cand, ref, 2)
    if len(cand) >= len(ref):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(ref) / len(cand))
    return bp * math.sqrt(p1 * p2)


# --- embedding similarities ----------------------------------------------

SIMILARITY_TARGETS = ("conclusion", "question", "context")


def semantic_similarity(elab: ElaborationRecord, target: str, item: TaskItem,
                        embedder) -> float:
    if target == "conclusion":
        text = item.answers[0]
    elif target == "question":
        text = build_question(item)
    elif target == "context":
        text = item.context_text
    else:
        raise ValueError(f"unknown similarity target {target!r}")
    u, v = embedder.embed([elab.full_text, text])
    return cosine(u, v)


def redundancy(sentences: Sequence[str]) -> float | None:
    """Mean pairwise BLEU2 over ordered sentence pairs."""
    if not sentences:
        return None
    if len(sentences) == 1:
        return 1.0
    scores = [
        bleu2(a, b)
        for i, a in enumerate(sentences)
        for j, b in enumerate(sentences)
        if i != j
    ]
    return sum(scores) / len(scores)


def coherence(sentences: Sequence[str], embedder) -> float | None:
    """Mean pairwise embedding cosine over unordered sentence pairs."""
    if not sentences:
        return None
    if len(sentences) == 1:
        return 1.0
    vectors = embedder.embed(list(sentences))
    scores = [
        cosine(vectors[i], vectors[j])
        for i in range(len(vectors))
        for j in range(i + 1, len(vectors))
    ]
    return sum(scores) / len(scores)


# --- logistic regression --------------------------------------------------

@dataclass(frozen=True)
class RegressionResult:
    coefficients: dict[str, float]
    pseudo_r2: float  # McFadden
    cox_snell_r2: float
    n: int
    converged: bool
    diagnostic: str = ""


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def log_likelihood(design: np.ndarray, labels: np.ndarray, beta: np.ndarray) -> float:
    z = design @ beta
    # log p(y|z) = y*z - log(1+e^z), stably
    return float(np.sum(labels * z - np.logaddexp(0.0, z)))


def log_likelihood_gradient(design: np.ndarray, labels: np.ndarray,
                            beta: np.ndarray) -> np.ndarray:
    return design.T @ (labels - _sigmoid(design @ beta))


def logistic_fit(features, labels, feature_names: Sequence[str] | None = None,
                 max_iter: int = 100, tol: float = 1e-8) -> RegressionResult:
    """Maximum-likelihood fit via iteratively reweighted least squares.

    Features are standardized internally; coefficients are reported on the
    standardized scale plus an intercept.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(labels, dtype=float)
    n, k = x.shape
    if n < 10 * k:
        raise ValueError(f"need n >= 10 * features; got n={n}, k={k}")
    if feature_names is None:
        feature_names = [f"x{i + 1}" for i in range(k)]

    mean = x.mean(axis=0)
    std = x.std(axis=0)
    if np.any(std == 0):
        raise ValueError("singular design: constant feature column")
    xs = (x - mean) / std
    design = np.hstack([np.ones((n, 1)), xs])

    beta = np.zeros(k + 1)
    converged = False
    diagnostic = ""
    for _ in range(max_iter):
        mu = _sigmoid(design @ beta)
        w = np.clip(mu * (1.0 - mu), 1e-12, None)
        try:
            hessian = design.T @ (design * w[:, None])
            delta = np.linalg.solve(hessian, design.T @ (y - mu))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"singular design: {exc}") from exc
        beta += delta
        if np.max(np.abs(delta)) < tol:
            converged = True
            break
        if np.max(np.abs(beta)) > 1e6:
            diagnostic = "perfect separation suspected: coefficients diverging"
            break
    if not converged and not diagnostic:
        diagnostic = f"no convergence in {max_iter} iterations"

    ll = log_likelihood(design, y, beta)
    p0 = np.clip(y.mean(), 1e-12, 1 - 1e-12)
    ll0 = float(n * (p0 * math.log(p0) + (1 - p0) * math.log(1 - p0)))
    mcfadden = 1.0 - ll / ll0 if ll0 != 0 else 0.0
    cox_snell = 1.0 - math.exp(min(700.0, (2.0 / n) * (ll0 - ll)))

    coeffs = {"intercept": float(beta[0])}
    coeffs.update({name: float(b) for name, b in zip(feature_names, beta[1:])})
    return RegressionResult(
        coefficients=coeffs,
        pseudo_r2=mcfadden,
        cox_snell_r2=cox_snell,
        n=n,
        converged=converged,
        diagnostic=diagnostic,
    )
