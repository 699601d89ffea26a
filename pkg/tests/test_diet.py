import io

import pytest

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.diet import (
    CONSTRAINTS,
    INVALID,
    VALID,
    LexiconFormatError,
    adherence_pct,
    find_violations,
    load_food_list,
    load_lexicon,
    load_lexicons,
    tag_recipe,
)


def _lex(text: str):
    return load_lexicon(io.BytesIO(text.encode("utf-8")))


def test_load_lexicon_header_terms_exceptions():
    lex = _lex("constraint: dairy-free\nmilk\nbutter\n!peanut butter\n")
    assert lex.constraint == "dairy-free"
    assert lex.violating_terms == frozenset({"milk", "butter"})
    assert lex.exceptions == frozenset({"peanut butter"})


def test_load_lexicon_rejects_bad_files():
    with pytest.raises(LexiconFormatError):
        _lex("milk\n")                                # no header
    with pytest.raises(LexiconFormatError):
        _lex("constraint: keto\nmilk\n")              # unknown id
    with pytest.raises(LexiconFormatError):
        _lex("constraint: dairy-free\n")              # no terms
    with pytest.raises(LexiconFormatError):
        _lex("constraint: dairy-free\nmilk\n!tofu\n")  # exception w/o term


def test_find_violations_whole_token():
    lex = _lex("constraint: dairy-free\nmilk\n")
    assert find_violations("buttermilk pancakes", lex) == []
    hits = find_violations("Add the milk now", lex)
    assert [term for _, term in hits] == ["milk"]
    (start, end), _ = hits[0]
    assert "Add the milk now"[start:end] == "milk"


def test_find_violations_plural_and_case():
    lex = _lex("constraint: egg-free\negg\n")
    assert [t for _, t in find_violations("Beat the EGGS well", lex)] == ["egg"]


def test_longest_term_wins():
    lex = _lex("constraint: dairy-free\ncream\nheavy cream\n")
    hits = find_violations("stir in heavy cream", lex)
    assert [t for _, t in hits] == ["heavy cream"]


def test_exception_suppresses_match():
    lex = _lex("constraint: dairy-free\nbutter\n!peanut butter\n")
    assert find_violations("add peanut butter", lex) == []
    assert [t for _, t in find_violations("add butter", lex)] == ["butter"]


def test_lookalike_phrase_pitfalls(lexicons):
    assert find_violations("1 beefsteak tomato", lexicons["vegan"]) == []
    assert find_violations("1 beefsteak tomato", lexicons["vegetarian"]) == []
    assert find_violations("1 cup oyster crackers", lexicons["fish-free"]) == []
    assert find_violations("2 tsp egg replacer", lexicons["egg-free"]) == []
    assert find_violations("2 tsp egg replacer", lexicons["vegan"]) == []


def test_tag_recipe_scans_ingredients_only(dairy_lexicon):
    recipe = Recipe("r", "Cocoa", ("cocoa powder", "2 cups milk"),
                    ("Mix.", "Add milk."))
    tag = tag_recipe(recipe, dairy_lexicon)
    assert tag.status == INVALID
    assert tag.violations == ((1, "milk"),)

    steps_only = Recipe("r", "Cocoa", ("cocoa powder",), ("Add milk.",))
    assert tag_recipe(steps_only, dairy_lexicon).status == VALID


def test_load_lexicons_checks_keys():
    stream = io.BytesIO(b"constraint: vegan\nmilk\n")
    with pytest.raises(LexiconFormatError):
        load_lexicons({"dairy-free": stream})


def test_all_shipped_lexicons_load(lexicons):
    assert set(lexicons) == set(CONSTRAINTS)


def test_adherence_pct(dairy_lexicon, foods):
    clean = Recipe("a", "T", ("soymilk",), ("Pour soymilk.", "Serve."))
    assert adherence_pct(clean, dairy_lexicon, foods) == 100.0

    mixed = Recipe("b", "T", ("milk", "sugar"), ("Add milk to sugar.",))
    # mentions: milk, sugar, milk, sugar -> 2 of 4 violating
    assert adherence_pct(mixed, dairy_lexicon, foods) == 50.0

    no_foods = Recipe("c", "T", ("quinoa",), ("Rinse it.",))
    assert adherence_pct(no_foods, dairy_lexicon, foods) == 100.0


def test_empty_food_list_rejected():
    with pytest.raises(LexiconFormatError):
        load_food_list(io.BytesIO(b"# only a comment\n"))
