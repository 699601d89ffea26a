import pytest

from recipe_rewriter.align import (
    AlignConfig,
    AlignmentError,
    align_recipe_pair,
    dish_key,
    group_dishes,
    make_pairs,
    merged_target_text,
    pair_from_json,
    pair_to_json,
    RecipePair,
    score_step_pair,
    StepAlignment,
)
from recipe_rewriter.corpus import Corpus, Recipe


def test_config_validation():
    with pytest.raises(AlignmentError):
        AlignConfig(threshold=101.0)
    with pytest.raises(AlignmentError):
        AlignConfig(scorer="bleu")


def test_dish_key_normalization(strip_lists):
    assert dish_key("Hot Cocoa", strip_lists) == \
        dish_key("hot cocoa", strip_lists)
    assert dish_key("The Ultimate Hot Cocoa", strip_lists) == \
        dish_key("Cocoa, Hot!", strip_lists)
    assert dish_key("Hot Cocoa", strip_lists) != \
        dish_key("Iced Cocoa", strip_lists)


def test_group_dishes(strip_lists):
    recipes = tuple(
        Recipe(i, t, ("x",), ("a", "b")) for i, t in
        [("1", "Hot Cocoa"), ("2", "hot cocoa"), ("3", "Beer Bread")])
    groups = group_dishes(Corpus(recipes), strip_lists)
    assert sorted(len(g.members) for g in groups) == [1, 2]


def test_score_step_pair():
    assert score_step_pair("Mix the sugar.", "Mix the sugar.") == 100.0
    assert score_step_pair("", "Mix.") == 0.0
    assert score_step_pair("Mix.", "") == 0.0
    assert score_step_pair("apple pie", "banana bread") == 0.0
    # symmetric
    a, b = "Pour milk on top.", "Pour the soymilk on top."
    assert score_step_pair(a, b) == pytest.approx(score_step_pair(b, a))
    assert 0.0 < score_step_pair(a, b) < 100.0


def _recipes(n_src, n_tgt):
    src = Recipe("s", "T", ("x",), tuple(f"src {i}" for i in range(n_src)))
    tgt = Recipe("t", "T", ("x",), tuple(f"tgt {i}" for i in range(n_tgt)))
    return src, tgt


def test_injected_matrix_shape_checked():
    src, tgt = _recipes(2, 2)
    with pytest.raises(AlignmentError):
        align_recipe_pair(src, tgt, injected_scores=[[1.0, 2.0]])


def test_target_owned_by_best_source():
    src, tgt = _recipes(2, 1)
    matrix = [[60.0], [90.0]]
    al = align_recipe_pair(src, tgt, injected_scores=matrix)
    assert al == [StepAlignment(2, (1,), 90.0)]


def test_ownership_tie_goes_to_earlier_source():
    src, tgt = _recipes(2, 1)
    al = align_recipe_pair(src, tgt, injected_scores=[[80.0], [80.0]])
    assert al == [StepAlignment(1, (1,), 80.0)]


def test_below_threshold_source_steps_omitted():
    src, tgt = _recipes(2, 2)
    matrix = [[49.9, 0.0], [0.0, 50.0]]
    al = align_recipe_pair(src, tgt, injected_scores=matrix)
    assert al == [StepAlignment(2, (2,), 50.0)]


def test_merge_takes_max_score_and_sorted_indices():
    src, tgt = _recipes(1, 3)
    al = align_recipe_pair(src, tgt, injected_scores=[[70.0, 55.0, 99.0]])
    assert al == [StepAlignment(1, (1, 2, 3), 99.0)]


def test_make_pairs_invalid_times_valid(dairy_lexicon, strip_lists):
    shared = ("Mix cocoa powder and sugar in a mug.",
              "Pour the liquid on top and stir.")
    members = (
        Recipe("inv", "Hot Cocoa", ("1 cup milk",), shared),
        Recipe("val", "Hot Cocoa", ("1 cup soymilk",), shared),
        Recipe("val2", "Hot Cocoa", ("1 cup water",), shared),
    )
    groups = group_dishes(Corpus(members), strip_lists)
    pairs = make_pairs(groups[0], "dairy-free", dairy_lexicon)
    assert sorted((p.source.id, p.target.id) for p in pairs) == \
        [("inv", "val"), ("inv", "val2")]
    for p in pairs:
        assert p.alignments


def test_pair_json_roundtrip():
    src, tgt = _recipes(2, 2)
    pair = RecipePair("vegan", src, tgt,
                      (StepAlignment(1, (1, 2), 88.5),))
    assert pair_from_json(pair_to_json(pair)) == pair


def test_merged_target_text():
    src, tgt = _recipes(1, 3)
    pair = RecipePair("vegan", src, tgt, (StepAlignment(1, (1, 3), 90.0),))
    assert merged_target_text(pair, pair.alignments[0]) == "tgt 0 tgt 2"
