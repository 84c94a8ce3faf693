"""Pretrained-model engine (transformers + torch; optional dependency).

Wraps a causal LM for generation and continuation scoring, plus a
mean-pooled transformer embedder. Loading downloads weights on first use,
so nothing here is imported unless a model name is configured.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer


@dataclass
class HFEngine:
    model_name: str = "gpt2"
    device: str = "cpu"

    def __post_init__(self):
        self.tokenizer = AutoTokenizer.from_pretrained(self.model_name)
        self.model = AutoModelForCausalLM.from_pretrained(self.model_name)
        self.model.to(self.device)
        self.model.eval()

    @torch.no_grad()
    def generate(self, prompt: str, mode: str, top_p: float, beam_width: int,
                 max_new_tokens: int, seed: int) -> str:
        if mode not in ("nucleus", "beam"):
            raise ValueError(f"unknown decoding mode {mode!r}")
        if not prompt:
            raise ValueError("empty prompt")
        inputs = self.tokenizer(prompt, return_tensors="pt").to(self.device)
        if mode == "nucleus":
            torch.manual_seed(seed)
            output = self.model.generate(
                **inputs, do_sample=True, top_p=top_p,
                max_new_tokens=max_new_tokens,
                pad_token_id=self.tokenizer.eos_token_id,
            )
        else:
            output = self.model.generate(
                **inputs, do_sample=False, num_beams=beam_width,
                max_new_tokens=max_new_tokens,
                pad_token_id=self.tokenizer.eos_token_id,
            )
        new_tokens = output[0][inputs["input_ids"].shape[1]:]
        return self.tokenizer.decode(new_tokens, skip_special_tokens=True)

    @torch.no_grad()
    def score(self, prompt: str, continuation: str) -> float:
        if not prompt or not continuation:
            raise ValueError("prompt and continuation must be non-empty")
        prompt_ids = self.tokenizer(prompt, return_tensors="pt")["input_ids"]
        full_ids = self.tokenizer(prompt + continuation,
                                  return_tensors="pt")["input_ids"]
        full_ids = full_ids.to(self.device)
        logits = self.model(full_ids).logits[0]
        log_probs = torch.log_softmax(logits, dim=-1)
        start = prompt_ids.shape[1]
        total = 0.0
        for pos in range(start, full_ids.shape[1]):
            total += log_probs[pos - 1, full_ids[0, pos]].item()
        return total


@dataclass
class HFEmbedder:
    model_name: str = "gpt2"
    device: str = "cpu"

    def __post_init__(self):
        self.tokenizer = AutoTokenizer.from_pretrained(self.model_name)
        self.model = AutoModelForCausalLM.from_pretrained(
            self.model_name, output_hidden_states=True)
        self.model.to(self.device)
        self.model.eval()

    @torch.no_grad()
    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        if not texts:
            raise ValueError("no texts to embed")
        out = []
        for text in texts:
            ids = self.tokenizer(text or " ", return_tensors="pt").to(self.device)
            hidden = self.model(**ids).hidden_states[-1][0]
            vec = hidden.mean(dim=0)
            vec = vec / (vec.norm() + 1e-12)
            out.append(vec.tolist())
        return out
