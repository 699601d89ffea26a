"""Ingredient extraction: which listed ingredients does a step mention?

An ingredient line is stripped down to its core term (quantities, measure
words, and descriptors removed), then the longest contiguous token n-gram
shared by the core and the step is taken as the mention. Measure words can
never be 1-token matches because they never survive into the core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.kernels import longest_common_run
from recipe_rewriter.textnorm import clean_span, is_quantity, tokenize, tokenize_spans


class EmptyCoreError(Exception):
    """Ingredient line has no tokens left after stripping (caller skips)."""


@dataclass(frozen=True)
class StripLists:
    measure_words: frozenset[str]
    descriptors: frozenset[str]

    def covers(self, token: str) -> bool:
        return token in self.measure_words or token in self.descriptors


@dataclass(frozen=True)
class IngredientMention:
    ingredient_index: int
    matched_ngram: str
    step_span: tuple[int, int]


def load_strip_lists(stream: BinaryIO | Iterable[bytes]) -> StripLists:
    """One term per line under ``[measures]`` / ``[descriptors]`` sections."""
    sections: dict[str, set[str]] = {"measures": set(), "descriptors": set()}
    current: set[str] | None = None
    for raw in stream:
        line = clean_span(raw.decode("utf-8")).lower()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name not in sections:
                raise ValueError(f"unknown strip-list section {name!r}")
            current = sections[name]
            continue
        if current is None:
            raise ValueError("strip-list term before any section header")
        current.update(tokenize(line))
    return StripLists(frozenset(sections["measures"]),
                      frozenset(sections["descriptors"]))


def strip_core_tokens(line: str, lists: StripLists) -> list[str]:
    """Core tokens of an ingredient line; may be empty."""
    return [t for t in tokenize(line)
            if not is_quantity(t) and not lists.covers(t)]


def strip_ingredient_line(line: str, lists: StripLists) -> str:
    """Core term of an ingredient line ("2 tablespoons chopped walnuts" ->
    "walnuts"). Raises EmptyCoreError when everything is stripped."""
    core = strip_core_tokens(line, lists)
    if not core:
        raise EmptyCoreError(f"nothing left of ingredient line {line!r}")
    return " ".join(core)


def extract_step_ingredients(step: str, recipe: Recipe,
                             lists: StripLists) -> list[IngredientMention]:
    """Longest n-gram match between each ingredient core and the step.

    At most one mention per ingredient; ties broken by earliest step
    position; results ordered by step position. Case-insensitive and
    punctuation-tolerant via the shared tokenizer.
    """
    step_tokens = tokenize_spans(step)
    step_words = [t for t, _, _ in step_tokens]
    mentions: list[IngredientMention] = []
    for idx, line in enumerate(recipe.ingredients):
        core = strip_core_tokens(line, lists)
        if not core:
            continue
        length, _, b_start = longest_common_run(core, step_words)
        if length == 0:
            continue
        first = step_tokens[b_start]
        last = step_tokens[b_start + length - 1]
        mentions.append(IngredientMention(
            ingredient_index=idx,
            matched_ngram=" ".join(step_words[b_start:b_start + length]),
            step_span=(first[1], last[2]),
        ))
    mentions.sort(key=lambda m: (m.step_span[0], m.ingredient_index))
    return mentions
