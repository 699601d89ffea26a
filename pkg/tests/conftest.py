import json
from pathlib import Path

import pytest

from recipe_rewriter import resources
from recipe_rewriter.corpus import Recipe, parse_corpus

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "goldens"


@pytest.fixture(scope="session")
def lexicons():
    return resources.default_lexicons()

@pytest.fixture(scope="session")
def dairy_lexicon(lexicons):
    return lexicons["dairy-free"]

@pytest.fixture(scope="session")
def strip_lists():
    return resources.default_strip_lists()

@pytest.fixture(scope="session")
def foods():
    return resources.default_food_list()

@pytest.fixture(scope="session")
def table(lexicons):
    return resources.default_substitutions(lexicons)

@pytest.fixture(scope="session")
def dictionary():
    return resources.default_dictionary()

@pytest.fixture(scope="session")
def corpus30():
    with open(DATA_DIR / "corpus30.jsonl", "rb") as fh:
        corpus, skips = parse_corpus(fh)
    assert len(skips) == 0
    return corpus

@pytest.fixture(scope="session")
def labels30():
    return json.loads((DATA_DIR / "labels.json").read_text("utf-8"))


# The two Hot Cocoa recipes whose step-level alignment scores are pinned
# by the alignment acceptance matrix.
HOT_COCOA_SOURCE = Recipe(
    id="cocoa-src",
    title="Hot Cocoa",
    ingredients=("cocoa powder", "sugar", "salt", "2 cups milk",
                 "1 cup heavy cream", "vanilla extract"),
    steps=(
        "In a medium pot over medium heat, mix together cocoa powder, "
        "sugar, salt and milk.",
        "Heat until everything is dissolved and well combined, stirring "
        "occasionally (about 5-6 minutes).",
        "Stir in heavy cream and vanilla extract.",
        "Mix together until everything is heated but not boiling "
        "(about 3-4 minutes).",
        "Pour into your favorite mugs and top with desired toppings.",
    ),
)

HOT_COCOA_TARGET = Recipe(
    id="cocoa-tgt",
    title="Hot Cocoa",
    ingredients=("2 cups milk", "hot cocoa mix", "creamer",
                 "cinnamon sugar", "chocolate syrup",
                 "confectioner's sugar", "whipped cream"),
    steps=(
        "Heat milk to your desired temperature.",
        "While milk is being heated, mix hot cocoa mix, creamer, and "
        "cinnamon sugar in bowl.",
        "Add small squirt or about 1/4 teaspoon of chocolate syrup to "
        "dry mix.",
        "Add same amount of syrup again, or enough so that dry mix "
        "becomes lumps.",
        "Add confectioner's sugar and cocoa powder to mix (doesn't have "
        "to be as lumpy anymore).",
        "Pour mix into mug and pour milk on top.",
        "Add whipped cream and extra chocolate syrup.",
    ),
)

# 5x7 score matrix with the pinned cells; unscored cells are 0.
HOT_COCOA_SCORES = [
    [10.0, 99.7, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 37.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.1, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 99.9, 87.4],
]


@pytest.fixture(scope="session")
def hot_cocoa():
    return HOT_COCOA_SOURCE, HOT_COCOA_TARGET, HOT_COCOA_SCORES


SIX_STEP_RECIPE = Recipe(
    id="six",
    title="Layered Pudding",
    ingredients=("2 cups milk", "1 cup sugar", "3 tablespoons cornstarch",
                 "1 teaspoon vanilla extract"),
    steps=(
        "Whisk sugar and cornstarch in a saucepan.",
        "Pour in milk slowly while whisking.",
        "Cook over medium heat until thickened.",
        "Remove from heat and stir in vanilla extract.",
        "Divide between serving cups.",
        "Chill for two hours before serving.",
    ),
)


@pytest.fixture
def six_step_recipe():
    return SIX_STEP_RECIPE
