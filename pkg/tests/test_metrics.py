import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chainruler.backends import FallbackEmbedder
from chainruler.elaborate import Strategy, synthetic_expansion
from chainruler.generator import GenerationSpec, generate_dataset
from chainruler.lexicon import default_lexicon
from chainruler.metrics import (
    LuckCount,
    bleu2,
    coherence,
    ideal_elaborations,
    log_likelihood,
    log_likelihood_gradient,
    logistic_fit,
    redundancy,
    semantic_similarity,
    total_luck,
)

LEX = default_lexicon()
EMB = FallbackEmbedder()


class TestTotalLuck:
    def test_item1_context_only(self, jill):
        luck = total_luck(jill.context_text, "", jill.answer_literals[0])
        assert luck == LuckCount(context_hits=1, elaboration_hits=0)
        assert luck.total == 1

    def test_item1_with_oracle_final(self, jill):
        record = synthetic_expansion(jill, Strategy.ORACLE_FINAL, LEX,
                                     random.Random(0))
        luck = total_luck(jill.context_text, record.full_text,
                          jill.answer_literals[0])
        assert luck == LuckCount(context_hits=1, elaboration_hits=4)
        assert luck.total == 5

    def test_negated_occurrences_not_counted(self, jill):
        luck = total_luck("Jill is not guilty. Jill is not guilty.", "",
                          jill.answer_literals[0])
        assert luck.total == 0

    def test_counts_add_over_generated_items(self):
        spec = GenerationSpec(depth_range=(1, 3), breadth_range=(0, 3),
                              items_per_cell=3, seed=6)
        for item in generate_dataset(spec, LEX):
            record = synthetic_expansion(item, Strategy.ORACLE_INTERMEDIARY,
                                         LEX, random.Random(0))
            luck = total_luck(item.context_text, record.full_text,
                              item.answer_literals[0])
            ctx_only = total_luck(item.context_text, "", item.answer_literals[0])
            assert luck.context_hits == ctx_only.total
            assert luck.total >= ctx_only.total


class TestIdealElaborations:
    def test_item1_proof_chain(self, jill):
        proof, conclusions = ideal_elaborations(jill.problem, jill.subject)
        assert proof == (
            "Jill is green. "
            "If someone is green, then they are loud. "
            "If someone is loud, then they are guilty. "
            "Jill is guilty."
        )
        assert conclusions == "Jill is loud. Jill is guilty."

    def test_item2_conclusions(self, lily):
        _, conclusions = ideal_elaborations(lily.problem, lily.subject)
        assert conclusions == "Lily is careful. Lily is loud. Lily is generous."


def _naive_bleu2(cand_tokens, ref_tokens):
    """Independent reimplementation used as an oracle."""
    if not cand_tokens:
        return 0.0
    precisions = []
    for n in (1, 2):
        grams = [tuple(cand_tokens[i:i + n])
                 for i in range(len(cand_tokens) - n + 1)]
        if not grams:
            precisions.append(1.0)
            continue
        ref_grams = Counter(
            tuple(ref_tokens[i:i + n]) for i in range(len(ref_tokens) - n + 1))
        clipped = sum(min(c, ref_grams[g]) for g, c in Counter(grams).items())
        precisions.append(max(clipped, 1e-9) / len(grams))
    bp = 1.0 if len(cand_tokens) >= len(ref_tokens) else math.exp(
        1.0 - len(ref_tokens) / len(cand_tokens))
    return bp * math.sqrt(precisions[0] * precisions[1])


class TestBleu2:
    def test_identity(self):
        assert bleu2("Jill is guilty.", "Jill is guilty.") == pytest.approx(1.0)

    def test_empty_candidate(self):
        assert bleu2("", "Jill is guilty.") == 0.0

    def test_disjoint_is_tiny(self):
        assert bleu2("alpha beta gamma", "delta epsilon zeta") < 1e-4

    def test_brevity_penalty(self):
        # candidate 2 tokens, reference 5; both precisions are 1
        score = bleu2("Jill is", "Jill is guilty and loud")
        assert score == pytest.approx(math.exp(1.0 - 5 / 2))

    def test_single_token_candidate_vacuous_bigram(self):
        assert bleu2("guilty", "guilty") == pytest.approx(1.0)

    @given(st.data())
    def test_matches_naive_oracle(self, data):
        vocab = ["a", "b", "c", "d"]
        cand = data.draw(st.lists(st.sampled_from(vocab), max_size=12))
        ref = data.draw(st.lists(st.sampled_from(vocab), max_size=12))
        got = bleu2(" ".join(cand), " ".join(ref))
        assert got == pytest.approx(_naive_bleu2(cand, ref))

    @given(st.data())
    def test_bounded(self, data):
        vocab = ["x", "y", "z"]
        cand = data.draw(st.lists(st.sampled_from(vocab), min_size=1, max_size=10))
        ref = data.draw(st.lists(st.sampled_from(vocab), max_size=10))
        assert 0.0 <= bleu2(" ".join(cand), " ".join(ref)) <= 1.0


class TestSimilarity:
    def test_targets(self, jill):
        record = synthetic_expansion(jill, Strategy.ORACLE_FINAL, LEX,
                                     random.Random(0))
        sim = semantic_similarity(record, "conclusion", jill, EMB)
        assert sim == pytest.approx(1.0)  # repetition of the conclusion
        for target in ("question", "context"):
            assert 0.0 <= semantic_similarity(record, target, jill, EMB) <= 1.0

    def test_unknown_target(self, jill):
        record = synthetic_expansion(jill, Strategy.ORACLE_FINAL, LEX,
                                     random.Random(0))
        with pytest.raises(ValueError):
            semantic_similarity(record, "mood", jill, EMB)


class TestRedundancyCoherence:
    def test_empty(self):
        assert redundancy([]) is None
        assert coherence([], EMB) is None

    def test_single_sentence(self):
        assert redundancy(["Jill is loud."]) == 1.0
        assert coherence(["Jill is loud."], EMB) == 1.0

    def test_identical_sentences(self):
        sentences = ["Jill is guilty."] * 4
        assert redundancy(sentences) == pytest.approx(1.0)
        assert coherence(sentences, EMB) == pytest.approx(1.0)

    def test_disjoint_sentences(self):
        sentences = ["alpha beta.", "gamma delta.", "epsilon zeta."]
        assert redundancy(sentences) < 1e-4
        # hashed-ngram buckets can collide, so only near-zero is guaranteed
        assert coherence(sentences, EMB) < 0.35

    def test_redundancy_between_bounds(self):
        value = redundancy(["Jill is loud.", "Jill is guilty."])
        assert 0.0 < value < 1.0


class TestLogisticFit:
    def test_planted_coefficients_recovered(self):
        rng = np.random.default_rng(0)
        n = 10_000
        x = rng.standard_normal((n, 3))
        true_beta = np.array([0.5, -1.0, 2.0])
        p = 1.0 / (1.0 + np.exp(-(0.3 + x @ true_beta)))
        y = (rng.random(n) < p).astype(float)
        result = logistic_fit(x, y, ["a", "b", "c"])
        assert result.converged
        assert result.coefficients["intercept"] == pytest.approx(0.3, abs=0.1)
        for name, target in zip("abc", true_beta):
            assert result.coefficients[name] == pytest.approx(target, abs=0.1)
        assert 0.0 < result.pseudo_r2 < 1.0
        assert 0.0 < result.cox_snell_r2 < 1.0

    def test_uninformative_feature_near_zero(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((2000, 1))
        y = (rng.random(2000) < 0.5).astype(float)
        result = logistic_fit(x, y, ["noise"])
        assert abs(result.coefficients["noise"]) < 0.1
        assert result.pseudo_r2 == pytest.approx(0.0, abs=0.01)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        design = np.hstack([np.ones((50, 1)), rng.standard_normal((50, 2))])
        y = (rng.random(50) < 0.5).astype(float)
        beta = rng.standard_normal(3) * 0.5
        grad = log_likelihood_gradient(design, y, beta)
        h = 1e-6
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            numeric = (log_likelihood(design, y, beta + e)
                       - log_likelihood(design, y, beta - e)) / (2 * h)
            assert abs(grad[j] - numeric) <= 1e-6 * max(1.0, abs(numeric))

    def test_constant_column_rejected(self):
        x = np.ones((100, 1))
        y = np.zeros(100)
        with pytest.raises(ValueError, match="singular"):
            logistic_fit(x, y)

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError, match="n >= 10"):
            logistic_fit(np.zeros((5, 2)), np.zeros(5))

    def test_perfect_separation_diagnosed(self):
        x = np.linspace(-1, 1, 200)[:, None]
        y = (x[:, 0] > 0).astype(float)
        result = logistic_fit(x, y, ["sep"])
        assert not result.converged
        assert "separation" in result.diagnostic or "convergence" in result.diagnostic
