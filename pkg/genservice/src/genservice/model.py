"""Small causal language model with a byte-level tokenizer.

The model is a tiny GPT-2 architecture whose weights are initialized from
a fixed seed at startup, so every instance of the service serves the same
function. (A hub-downloaded checkpoint plugs in the same way when one is
available; this process has no model hub access, and the service exists
to exercise the wire protocol, not to produce publication-quality text.)

The tokenizer is plain UTF-8 bytes: 256 symbols, no vocabulary files, and
any string round-trips. Stop-token handling happens on the decoded string,
so the grammar's multi-character separators need no special token ids.
"""

from __future__ import annotations

import math
import threading

import torch
from transformers import GPT2Config, GPT2LMHeadModel

MAX_CONTEXT = 1024

# Tiny generic-English corpus the model is fitted to at startup, so
# perplexity prefers common words over character soup. This is generic
# calibration text, not task training data.
_PRETRAIN_TEXT = (
    "Mix the flour and the water in a large bowl until the batter is "
    "smooth and thick. Pour the mixture into the pan and heat it over "
    "medium heat until it is warm all the way through. Stir in the sugar "
    "and the salt, then let it rest for ten minutes before serving. "
    "Add the onion and the garlic to the pot and cook them until they "
    "are soft and golden. Bring the water to a boil, then lower the heat "
    "and let it simmer gently for twenty minutes. Serve it warm with "
    "bread on the side and enjoy it with the whole family at the table. "
    "Take the bread out of the oven and let it cool on a rack before "
    "you cut it into thick slices. Spread the topping over the top and "
    "sprinkle a little salt on it. The sauce should be smooth and thick "
    "enough to coat the back of a spoon when it is ready to serve. "
) * 4


class ByteTokenizer:
    vocab_size = 256

    def encode(self, text: str) -> list[int]:
        return list(text.encode("utf-8"))

    def decode(self, ids: list[int]) -> str:
        return bytes(ids).decode("utf-8", errors="replace")


class CausalLM:
    """Seeded tiny GPT-2 over bytes with top-k / nucleus sampling."""

    def __init__(self, weight_seed: int = 1234, n_layer: int = 2,
                 n_head: int = 2, n_embd: int = 64):
        self.tokenizer = ByteTokenizer()
        torch.manual_seed(weight_seed)
        config = GPT2Config(vocab_size=self.tokenizer.vocab_size,
                            n_positions=MAX_CONTEXT, n_ctx=MAX_CONTEXT,
                            n_layer=n_layer, n_head=n_head, n_embd=n_embd,
                            bos_token_id=None, eos_token_id=None)
        self.model = GPT2LMHeadModel(config)
        self._pretrain()
        self.model.eval()
        self._lock = threading.Lock()

    def _pretrain(self, steps: int = 120, chunk: int = 256):
        """Deterministic calibration on the embedded corpus so likelihoods
        reflect ordinary English byte statistics."""
        data = torch.tensor(self.tokenizer.encode(_PRETRAIN_TEXT),
                            dtype=torch.long)
        optimizer = torch.optim.Adam(self.model.parameters(), lr=3e-3)
        rng = torch.Generator()
        rng.manual_seed(0)
        self.model.train()
        for _ in range(steps):
            start = int(torch.randint(0, len(data) - chunk - 1, (1,),
                                      generator=rng))
            batch = data[start:start + chunk].unsqueeze(0)
            loss = self.model(input_ids=batch, labels=batch).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

    # --- sampling ---

    def _next_token(self, logits: torch.Tensor, top_k: int, nucleus: float,
                    temperature: float,
                    generator: torch.Generator | None) -> int:
        if temperature <= 0.0:
            return int(torch.argmax(logits))
        logits = logits / temperature
        if top_k > 0:
            kth = torch.topk(logits, min(top_k, logits.numel())).values[-1]
            logits = logits.masked_fill(logits < kth, float("-inf"))
        probs = torch.softmax(logits, dim=-1)
        if nucleus < 1.0:
            sorted_probs, order = torch.sort(probs, descending=True)
            keep = torch.cumsum(sorted_probs, dim=-1) - sorted_probs < nucleus
            keep[0] = True
            mask = torch.zeros_like(probs, dtype=torch.bool)
            mask[order[keep]] = True
            probs = torch.where(mask, probs, torch.zeros_like(probs))
            probs = probs / probs.sum()
        return int(torch.multinomial(probs, 1, generator=generator))

    @torch.no_grad()
    def sample(self, prompt: str, max_new_tokens: int, top_k: int,
               nucleus: float, temperature: float, stop_token: str,
               seed: int | None = None) -> str:
        """One completion, cut at stop_token when it appears."""
        generator = None
        if seed is not None:
            generator = torch.Generator()
            generator.manual_seed(seed)
        ids = self.tokenizer.encode(prompt)
        # keep the suffix: target-side context sits at the end of the prompt
        budget = MAX_CONTEXT - max_new_tokens
        ids = ids[-budget:]
        generated: list[int] = []
        with self._lock:
            input_ids = torch.tensor([ids], dtype=torch.long)
            past = None
            for _ in range(max_new_tokens):
                out = self.model(input_ids=input_ids, past_key_values=past,
                                 use_cache=True)
                past = out.past_key_values
                token = self._next_token(out.logits[0, -1], top_k, nucleus,
                                         temperature, generator)
                generated.append(token)
                text = self.tokenizer.decode(generated)
                if stop_token and stop_token in text:
                    return text.split(stop_token)[0]
                input_ids = torch.tensor([[token]], dtype=torch.long)
        return self.tokenizer.decode(generated)

    @torch.no_grad()
    def perplexity(self, text: str) -> float:
        """exp of the mean token negative log-likelihood."""
        ids = self.tokenizer.encode(text)[:MAX_CONTEXT]
        if len(ids) < 2:
            # a single byte has no conditional to score; treat the byte as
            # predicted from an empty context via the model's first step
            ids = [0] + ids
        with self._lock:
            input_ids = torch.tensor([ids], dtype=torch.long)
            logits = self.model(input_ids=input_ids).logits
        log_probs = torch.log_softmax(logits[0, :-1], dim=-1)
        targets = torch.tensor(ids[1:], dtype=torch.long)
        nll = -log_probs[torch.arange(len(targets)), targets].mean()
        return float(math.exp(nll))
