"""Dietary-constraint lexicons, recipe tagging, and adherence measurement.

A lexicon file is UTF-8 text: a header line ``constraint: <id>``, then one
violating term per line; exception lines are prefixed with ``!``. Exceptions
are longer phrases that look like they contain a violating term but do not
("beefsteak tomato", "oyster crackers", "egg replacer") and suppress any
violating-term match inside their span.

Matching is whole-token, lowercase, NFC, with crude plural stripping.
Negation ("This recipe is not vegan!") and optional-ingredient phrasing are
deliberately not handled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.textnorm import (
    clean_span,
    singular_variants,
    tokenize,
    tokenize_spans,
)

CONSTRAINTS = (
    "dairy-free",
    "nut-free",
    "egg-free",
    "vegan",
    "vegetarian",
    "alcohol-free",
    "fish-free",
)

VALID = "valid"
INVALID = "invalid"


class LexiconFormatError(Exception):
    """Lexicon or food-list file does not match the documented format."""


@dataclass(frozen=True)
class ConstraintLexicon:
    constraint: str
    violating_terms: frozenset[str]
    exceptions: frozenset[str] = frozenset()

    def __post_init__(self):
        # ordered longest-first so the scanner's longest-match-wins rule
        # falls out of iteration order
        object.__setattr__(self, "_term_tokens", _term_index(self.violating_terms))
        object.__setattr__(self, "_exception_tokens", _term_index(self.exceptions))


@dataclass(frozen=True)
class DietTag:
    constraint: str
    status: str
    violations: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class FoodList:
    known_foods: frozenset[str]

    def __post_init__(self):
        if not self.known_foods:
            raise LexiconFormatError("food list is empty")
        object.__setattr__(self, "_food_tokens", _term_index(self.known_foods))


def _term_index(terms: Iterable[str]) -> tuple[tuple[tuple[str, ...], str], ...]:
    indexed = [(tuple(tokenize(t)), t) for t in sorted(terms)]
    indexed.sort(key=lambda item: -len(item[0]))
    return tuple(indexed)


def _match_at(tokens: list[tuple[str, int, int]], pos: int,
              term: tuple[str, ...]) -> bool:
    if pos + len(term) > len(tokens):
        return False
    return all(term[k] in singular_variants(tokens[pos + k][0])
               for k in range(len(term)))


def _scan(tokens: list[tuple[str, int, int]],
          terms: tuple[tuple[tuple[str, ...], str], ...],
          exceptions: tuple[tuple[tuple[str, ...], str], ...] = (),
          ) -> list[tuple[tuple[int, int], str]]:
    """Longest-match, left-to-right scan; exception spans are skipped whole."""
    matches: list[tuple[tuple[int, int], str]] = []
    i = 0
    n = len(tokens)
    while i < n:
        skipped = False
        for exc_tokens, _ in exceptions:
            if exc_tokens and _match_at(tokens, i, exc_tokens):
                i += len(exc_tokens)
                skipped = True
                break
        if skipped:
            continue
        hit = None
        for term_tokens, term in terms:
            if term_tokens and _match_at(tokens, i, term_tokens):
                hit = (term_tokens, term)
                break
        if hit is None:
            i += 1
        else:
            span = (tokens[i][1], tokens[i + len(hit[0]) - 1][2])
            matches.append((span, hit[1]))
            i += len(hit[0])
    return matches


def load_lexicon(stream: BinaryIO | Iterable[bytes]) -> ConstraintLexicon:
    constraint = None
    terms: set[str] = set()
    exceptions: set[str] = set()
    for raw in stream:
        line = clean_span(raw.decode("utf-8"))
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("constraint:"):
            constraint = line.split(":", 1)[1].strip().lower()
            continue
        if constraint is None:
            raise LexiconFormatError(
                "lexicon must start with a 'constraint: <id>' header")
        if line.startswith("!"):
            exceptions.add(line[1:].strip().lower())
        else:
            terms.add(line.lower())
    if constraint is None:
        raise LexiconFormatError("missing 'constraint: <id>' header")
    if constraint not in CONSTRAINTS:
        raise LexiconFormatError(f"unknown constraint id {constraint!r}")
    if not terms:
        raise LexiconFormatError(f"lexicon for {constraint!r} has no terms")
    for exc in exceptions:
        if not any(term in exc for term in terms):
            raise LexiconFormatError(
                f"exception {exc!r} contains no violating term")
    return ConstraintLexicon(constraint, frozenset(terms), frozenset(exceptions))


def load_food_list(stream: BinaryIO | Iterable[bytes]) -> FoodList:
    foods = set()
    for raw in stream:
        line = clean_span(raw.decode("utf-8")).lower()
        if line and not line.startswith("#"):
            foods.add(line)
    return FoodList(frozenset(foods))


def find_violations(text: str, lexicon: ConstraintLexicon
                    ) -> list[tuple[tuple[int, int], str]]:
    """Whole-token matches of violating terms not covered by an exception.

    Returns (character span, matched term) pairs; spans never overlap and
    the longest term wins at any position.
    """
    return _scan(tokenize_spans(text),
                 lexicon._term_tokens, lexicon._exception_tokens)


def tag_recipe(recipe: Recipe, lexicon: ConstraintLexicon) -> DietTag:
    """Tag by scanning ingredient lines only; a violating term that appears
    only in a step is missed (documented limitation)."""
    violations = []
    for idx, line in enumerate(recipe.ingredients):
        for _, term in find_violations(line, lexicon):
            violations.append((idx, term))
    status = VALID if not violations else INVALID
    return DietTag(lexicon.constraint, status, tuple(violations))


def adherence_pct(recipe: Recipe, lexicon: ConstraintLexicon,
                  foods: FoodList) -> float:
    """Percentage of food mentions (ingredient lines plus steps, matched
    against the food list) that do not violate the lexicon. 100 when the
    recipe mentions no known food at all."""
    total = 0
    violating = 0
    for text in list(recipe.ingredients) + list(recipe.steps):
        tokens = tokenize_spans(text)
        mentions = _scan(tokens, foods._food_tokens)
        if not mentions:
            continue
        bad_spans = [span for span, _ in find_violations(text, lexicon)]
        for (start, end), _ in mentions:
            total += 1
            if any(start < b_end and b_start < end
                   for b_start, b_end in bad_spans):
                violating += 1
    if total == 0:
        return 100.0
    return 100.0 * (total - violating) / total


def load_lexicons(streams: Mapping[str, BinaryIO]
                  ) -> dict[str, ConstraintLexicon]:
    """Load several lexicons keyed by constraint id, verifying the keys."""
    lexicons = {}
    for constraint, stream in streams.items():
        lexicon = load_lexicon(stream)
        if lexicon.constraint != constraint:
            raise LexiconFormatError(
                f"lexicon header {lexicon.constraint!r} does not match "
                f"expected constraint {constraint!r}")
        lexicons[constraint] = lexicon
    return lexicons
