"""Dish grouping, recipe pairing, and thresholded step alignment.

The step scorer here is a lexical surrogate (scaled ROUGE-L F1); the
merging/threshold logic also accepts an injected score matrix so it can be
driven by scores from an external alignment model and tested exactly.
"""

from __future__ import annotations

import json

from dataclasses import dataclass, field
from typing import Sequence

from recipe_rewriter.corpus import Corpus, Recipe
from recipe_rewriter.diet import INVALID, VALID, ConstraintLexicon, tag_recipe
from recipe_rewriter.extract import StripLists
from recipe_rewriter.kernels import lcs_length
from recipe_rewriter.textnorm import is_quantity, tokenize

DEFAULT_TAU = 50.0


class AlignmentError(Exception):
    """Bad alignment inputs (e.g. injected matrix shape mismatch)."""


@dataclass(frozen=True)
class AlignConfig:
    threshold: float = DEFAULT_TAU
    scorer: str = "rouge-l-f1"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 100.0:
            raise AlignmentError(
                f"threshold must be in [0, 100], got {self.threshold}")
        if self.scorer != "rouge-l-f1":
            raise AlignmentError(f"unknown scorer {self.scorer!r}")


@dataclass(frozen=True)
class DishGroup:
    dish_key: str
    members: tuple[Recipe, ...]


@dataclass(frozen=True)
class StepAlignment:
    src_index: int                 # 1-based source step
    tgt_indices: tuple[int, ...]   # 1-based, strictly increasing
    score: float


@dataclass(frozen=True)
class RecipePair:
    constraint: str
    source: Recipe
    target: Recipe
    alignments: tuple[StepAlignment, ...] = field(default_factory=tuple)


def dish_key(title: str, lists: StripLists) -> str:
    """Normalized grouping key: lowercase, measures/descriptors/quantities
    removed, remaining tokens sorted."""
    tokens = sorted(t for t in tokenize(title)
                    if not is_quantity(t) and not lists.covers(t))
    return " ".join(tokens)


def group_dishes(corpus: Corpus, lists: StripLists) -> list[DishGroup]:
    groups: dict[str, list[Recipe]] = {}
    for recipe in corpus.recipes:
        groups.setdefault(dish_key(recipe.title, lists), []).append(recipe)
    return [DishGroup(key, tuple(members))
            for key, members in sorted(groups.items())]


def score_step_pair(a: str, b: str) -> float:
    """100 x ROUGE-L F1 over lowercased content tokens; symmetric, 100 for
    identical non-empty texts, 0 when both are empty."""
    ta = tokenize(a)
    tb = tokenize(b)
    if not ta or not tb:
        return 0.0
    lcs = lcs_length(ta, tb)
    if lcs == 0:
        return 0.0
    precision = lcs / len(tb)
    recall = lcs / len(ta)
    return 100.0 * 2.0 * precision * recall / (precision + recall)


def _score_matrix(source: Recipe, target: Recipe) -> list[list[float]]:
    return [[score_step_pair(s, t) for t in target.steps]
            for s in source.steps]


def align_recipe_pair(source: Recipe, target: Recipe,
                      config: AlignConfig = AlignConfig(),
                      injected_scores: Sequence[Sequence[float]] | None = None,
                      ) -> list[StepAlignment]:
    """Thresholded, merged step alignment.

    Per source step, target steps scoring >= threshold qualify and are
    merged into one alignment (score = max). Each target index goes to at
    most one source step: the highest-scoring source wins, ties to the
    earlier source. Source steps with no qualifying target are omitted.
    """
    n_src = len(source.steps)
    n_tgt = len(target.steps)
    if injected_scores is not None:
        matrix = [list(row) for row in injected_scores]
        if len(matrix) != n_src or any(len(row) != n_tgt for row in matrix):
            raise AlignmentError(
                f"injected score matrix must be {n_src}x{n_tgt}")
    else:
        matrix = _score_matrix(source, target)

    tau = config.threshold
    # resolve target ownership first: best source per target
    owner: dict[int, int] = {}
    for t in range(n_tgt):
        best_s = None
        best_score = None
        for s in range(n_src):
            score = matrix[s][t]
            if score >= tau and (best_score is None or score > best_score):
                best_s = s
                best_score = score
        if best_s is not None:
            owner[t] = best_s

    alignments: list[StepAlignment] = []
    for s in range(n_src):
        targets = sorted(t for t, own in owner.items() if own == s)
        if not targets:
            continue
        alignments.append(StepAlignment(
            src_index=s + 1,
            tgt_indices=tuple(t + 1 for t in targets),
            score=max(matrix[s][t] for t in targets),
        ))
    return alignments


def make_pairs(group: DishGroup, constraint: str, lexicon: ConstraintLexicon,
               config: AlignConfig = AlignConfig()) -> list[RecipePair]:
    """Cartesian product of invalid x valid members of a dish group, each
    aligned; pairs with no retained step alignment are dropped."""
    tags = {r.id: tag_recipe(r, lexicon).status for r in group.members}
    invalid = [r for r in group.members if tags[r.id] == INVALID]
    valid = [r for r in group.members if tags[r.id] == VALID]
    pairs: list[RecipePair] = []
    for source in invalid:
        for target in valid:
            alignments = align_recipe_pair(source, target, config)
            if alignments:
                pairs.append(RecipePair(constraint, source, target,
                                        tuple(alignments)))
    return pairs


def merged_target_text(pair: RecipePair, alignment: StepAlignment) -> str:
    """Target step texts at the alignment's indices, space-joined in order."""
    return " ".join(pair.target.steps[i - 1] for i in alignment.tgt_indices)


def _recipe_obj(recipe: Recipe) -> dict:
    obj = {"id": recipe.id, "title": recipe.title,
           "ingredients": list(recipe.ingredients),
           "steps": list(recipe.steps)}
    if recipe.source is not None:
        obj["source"] = recipe.source
    return obj


def _recipe_from_obj(obj: dict) -> Recipe:
    return Recipe(obj["id"], obj["title"], tuple(obj["ingredients"]),
                  tuple(obj["steps"]), obj.get("source"))


def pair_to_json(pair: RecipePair) -> str:
    return json.dumps({
        "constraint": pair.constraint,
        "source": _recipe_obj(pair.source),
        "target": _recipe_obj(pair.target),
        "alignments": [{"src_index": a.src_index,
                        "tgt_indices": list(a.tgt_indices),
                        "score": a.score} for a in pair.alignments],
    }, ensure_ascii=False, sort_keys=True)


def pair_from_json(line: str) -> RecipePair:
    obj = json.loads(line)
    return RecipePair(
        constraint=obj["constraint"],
        source=_recipe_from_obj(obj["source"]),
        target=_recipe_from_obj(obj["target"]),
        alignments=tuple(StepAlignment(a["src_index"],
                                       tuple(a["tgt_indices"]), a["score"])
                         for a in obj["alignments"]),
    )
