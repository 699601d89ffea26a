"""Access to the starter configuration shipped with the package.

The lexicons, substitution table, strip lists, and food list are editable
configuration, not ground truth: the published method does not include its
term lists, so these are curated starters seeded from the documented
failure modes and substitution examples.
"""

from __future__ import annotations

import io
from importlib import resources

from recipe_rewriter.diet import (
    CONSTRAINTS,
    ConstraintLexicon,
    FoodList,
    load_food_list,
    load_lexicon,
)
from recipe_rewriter.extract import StripLists, load_strip_lists
from recipe_rewriter.substitute import SubstitutionTable, load_substitutions


def _data(name: str) -> io.BytesIO:
    payload = (resources.files("recipe_rewriter") / "data" / name).read_bytes()
    return io.BytesIO(payload)


def default_lexicon(constraint: str) -> ConstraintLexicon:
    return load_lexicon(_data(f"lexicons/{constraint}.txt"))


def default_lexicons() -> dict[str, ConstraintLexicon]:
    return {c: default_lexicon(c) for c in CONSTRAINTS}


def default_strip_lists() -> StripLists:
    return load_strip_lists(_data("striplists.txt"))


def default_food_list() -> FoodList:
    return load_food_list(_data("foods.txt"))


def default_substitutions(lexicons=None) -> SubstitutionTable:
    return load_substitutions(_data("substitutions.tsv"),
                              lexicons if lexicons is not None
                              else default_lexicons())


def default_dictionary() -> frozenset[str]:
    from recipe_rewriter.rewrite import load_dictionary

    return load_dictionary(_data("dictionary.txt"))
