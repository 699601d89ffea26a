import io

import pytest

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.extract import (
    EmptyCoreError,
    extract_step_ingredients,
    load_strip_lists,
    strip_core_tokens,
    strip_ingredient_line,
)


def test_load_strip_lists_sections():
    lists = load_strip_lists(io.BytesIO(
        b"[measures]\ncup\n[descriptors]\nchopped\n"))
    assert lists.covers("cup") and lists.covers("chopped")
    assert not lists.covers("walnuts")


def test_load_strip_lists_rejects_bad_input():
    with pytest.raises(ValueError):
        load_strip_lists(io.BytesIO(b"[weird]\nx\n"))
    with pytest.raises(ValueError):
        load_strip_lists(io.BytesIO(b"cup\n"))


def test_strip_ingredient_line(strip_lists):
    assert strip_ingredient_line(
        "2 tablespoons chopped walnuts", strip_lists) == "walnuts"
    assert strip_ingredient_line("1 cup milk", strip_lists) == "milk"
    with pytest.raises(EmptyCoreError):
        strip_ingredient_line("2 cups", strip_lists)


def test_strip_core_keeps_multiword_terms(strip_lists):
    assert strip_core_tokens("1 can sweetened condensed milk", strip_lists) \
        == ["sweetened", "condensed", "milk"]


def test_extract_longest_ngram(strip_lists):
    recipe = Recipe("r", "T",
                    ("1 can sweetened condensed milk", "1 cup sugar"),
                    ("Pour sweetened condensed milk over the sugar.",))
    mentions = extract_step_ingredients(recipe.steps[0], recipe, strip_lists)
    assert [(m.ingredient_index, m.matched_ngram) for m in mentions] == [
        (0, "sweetened condensed milk"), (1, "sugar")]
    start, end = mentions[0].step_span
    assert recipe.steps[0][start:end] == "sweetened condensed milk"


def test_measure_words_never_match_alone(strip_lists):
    recipe = Recipe("r", "T", ("2 cups flour",), ("Add a cup of water.",))
    assert extract_step_ingredients(recipe.steps[0], recipe, strip_lists) == []


def test_one_mention_per_ingredient_earliest_position(strip_lists):
    recipe = Recipe("r", "T", ("1 cup sugar",),
                    ("Add sugar, then more sugar.",))
    mentions = extract_step_ingredients(recipe.steps[0], recipe, strip_lists)
    assert len(mentions) == 1
    assert mentions[0].step_span[0] == len("Add ")


def test_results_ordered_by_step_position(strip_lists):
    recipe = Recipe("r", "T", ("1 cup milk", "2 tbsp cocoa powder"),
                    ("Whisk cocoa powder into the milk.",))
    mentions = extract_step_ingredients(recipe.steps[0], recipe, strip_lists)
    assert [m.ingredient_index for m in mentions] == [1, 0]


def test_unmatched_and_empty_core_ingredients_skipped(strip_lists):
    recipe = Recipe("r", "T", ("1 cup milk", "2 cups", "saffron"),
                    ("Boil the milk.",))
    mentions = extract_step_ingredients(recipe.steps[0], recipe, strip_lists)
    assert [m.ingredient_index for m in mentions] == [0]
