import io

import pytest

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.substitute import (
    SubstitutionError,
    build_rule_prompt,
    load_substitutions,
    rewrite_step_rule_based,
    substitute_term,
)


def test_load_rejects_malformed_rows(lexicons):
    with pytest.raises(SubstitutionError):
        load_substitutions(io.BytesIO(b"dairy-free\tmilk\n"), lexicons)
    with pytest.raises(SubstitutionError):
        load_substitutions(io.BytesIO(b"keto\tmilk\tsoymilk\n"), lexicons)


def test_load_rejects_duplicates_and_invalid_terms(lexicons):
    dup = b"dairy-free\tmilk\tsoymilk\ndairy-free\tmilk\toat milk\n"
    with pytest.raises(SubstitutionError):
        load_substitutions(io.BytesIO(dup), lexicons)
    # from_term must itself violate
    with pytest.raises(SubstitutionError):
        load_substitutions(io.BytesIO(b"dairy-free\ttofu\tsoymilk\n"),
                           lexicons)
    # to_term must not violate
    with pytest.raises(SubstitutionError):
        load_substitutions(io.BytesIO(b"dairy-free\tmilk\tgoat cheese\n"),
                           lexicons)


def test_substitute_term_longest_rule_wins(table):
    assert substitute_term("heavy cream", "dairy-free", table) \
        == "coconut cream"
    assert substitute_term("cream", "dairy-free", table) == "coconut cream"
    assert substitute_term("milk", "dairy-free", table) == "soymilk"
    # no rule -> unchanged
    assert substitute_term("saffron", "dairy-free", table) == "saffron"


def test_substitute_term_splices_inside_phrase(table):
    assert substitute_term("cold milk", "dairy-free", table) == "cold soymilk"


def test_rewrite_step_preserves_surroundings(dairy_lexicon, table):
    step = "Pour milk on top and add whipped cream."
    out, warnings = rewrite_step_rule_based(step, "dairy-free",
                                            dairy_lexicon, table)
    assert out == "Pour soymilk on top and add coconut whipped topping."
    assert warnings == []


def test_rewrite_step_unresolved_substitution_warns(lexicons, table):
    # ghee violates dairy-free but ships no rule
    out, warnings = rewrite_step_rule_based(
        "Melt the ghee.", "dairy-free", lexicons["dairy-free"], table)
    assert out == "Melt the ghee."
    assert warnings == ["unresolved-substitution: 'ghee'"]


def test_rewrite_step_shipped_rule_examples(lexicons, table):
    cases = [
        ("vegan", "Fry the bacon until crisp.",
         "Fry the imitation bacon until crisp."),
        ("egg-free", "Fold in the egg white gently.",
         "Fold in the egg white substitute gently."),
        ("alcohol-free", "Pour in the beer.",
         "Pour in the non-alcoholic beer."),
        ("fish-free", "Add the shrimp and cook.",
         "Add the tofu and cook."),
        ("dairy-free", "Spread butter on the bread.",
         "Spread nondairy butter on the bread."),
    ]
    for constraint, step, expected in cases:
        out, warnings = rewrite_step_rule_based(
            step, constraint, lexicons[constraint], table)
        assert out == expected, (constraint, step)
        assert warnings == []


def test_build_rule_prompt(lexicons, table, strip_lists):
    recipe = Recipe("r", "Cocoa",
                    ("2 cups milk", "2 tbsp cocoa powder", "1 cup sugar"),
                    ("Mix cocoa powder and sugar.", "Pour milk on top."))
    assert build_rule_prompt(recipe.steps[1], recipe, "dairy-free",
                             lexicons["dairy-free"], table, strip_lists) \
        == ["soymilk"]
    assert build_rule_prompt(recipe.steps[0], recipe, "dairy-free",
                             lexicons["dairy-free"], table, strip_lists) \
        == ["cocoa powder", "sugar"]
