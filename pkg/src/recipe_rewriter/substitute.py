"""Constraint-specific ingredient substitution and the rule-based rewriter.

The substitution file is UTF-8 with one rule per line:

    constraint <TAB> from_term <TAB> to_term

Rules are validated against the constraint lexicons at load: the from_term
must itself be a violation and the to_term must not be one. The rule-based
rewriter replaces violating terms in a step and touches nothing else; it
cannot adjust quantities, times, or techniques, and violations with no rule
are surfaced as warnings rather than errors (uncommon ingredients form a
long tail no finite table covers).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.diet import CONSTRAINTS, ConstraintLexicon, find_violations
from recipe_rewriter.extract import (
    StripLists,
    extract_step_ingredients,
    strip_core_tokens,
)
from recipe_rewriter.textnorm import clean_span, tokenize, tokenize_spans
from recipe_rewriter.diet import _match_at  # shared whole-token matcher


class SubstitutionError(Exception):
    """Substitution file fails validation."""


@dataclass(frozen=True)
class SubstitutionRule:
    constraint: str
    from_term: str
    to_term: str


@dataclass(frozen=True)
class SubstitutionTable:
    rules: tuple[SubstitutionRule, ...]

    def __post_init__(self):
        by_constraint: dict[str, list[tuple[tuple[str, ...], SubstitutionRule]]] = {}
        for rule in self.rules:
            by_constraint.setdefault(rule.constraint, []).append(
                (tuple(tokenize(rule.from_term)), rule))
        for entries in by_constraint.values():
            # most-specific-first: longer from_terms win; stable within length
            entries.sort(key=lambda e: -len(e[0]))
        object.__setattr__(self, "_by_constraint", by_constraint)

    def rules_for(self, constraint: str
                  ) -> list[tuple[tuple[str, ...], SubstitutionRule]]:
        return self._by_constraint.get(constraint, [])


def load_substitutions(stream: BinaryIO | Iterable[bytes],
                       lexicons: Mapping[str, ConstraintLexicon]
                       ) -> SubstitutionTable:
    rules: list[SubstitutionRule] = []
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(stream, start=1):
        line = clean_span(raw.decode("utf-8"))
        if not line or line.startswith("#"):
            continue
        parts = [p.strip().lower() for p in raw.decode("utf-8").split("\t")]
        if len(parts) != 3 or not all(parts):
            raise SubstitutionError(
                f"line {lineno}: expected 'constraint<TAB>from<TAB>to'")
        constraint, from_term, to_term = (clean_span(p) for p in parts)
        if constraint not in CONSTRAINTS:
            raise SubstitutionError(
                f"line {lineno}: unknown constraint {constraint!r}")
        key = (constraint, from_term)
        if key in seen:
            raise SubstitutionError(
                f"line {lineno}: duplicate rule for {key!r}")
        seen.add(key)
        lexicon = lexicons.get(constraint)
        if lexicon is not None:
            if not find_violations(from_term, lexicon):
                raise SubstitutionError(
                    f"line {lineno}: from_term {from_term!r} is not a "
                    f"violation for {constraint!r}")
            if find_violations(to_term, lexicon):
                raise SubstitutionError(
                    f"line {lineno}: to_term {to_term!r} still violates "
                    f"{constraint!r}")
        rules.append(SubstitutionRule(constraint, from_term, to_term))
    return SubstitutionTable(tuple(rules))


def substitute_term(term: str, constraint: str,
                    table: SubstitutionTable) -> str:
    """Replace the longest rule from_term occurring whole-token inside the
    term; unchanged when no rule matches."""
    tokens = tokenize_spans(term)
    for from_tokens, rule in table.rules_for(constraint):
        if not from_tokens:
            continue
        for i in range(len(tokens) - len(from_tokens) + 1):
            if _match_at(tokens, i, from_tokens):
                start = tokens[i][1]
                end = tokens[i + len(from_tokens) - 1][2]
                return term[:start] + rule.to_term + term[end:]
    return term


def rewrite_step_rule_based(step: str, constraint: str,
                            lexicon: ConstraintLexicon,
                            table: SubstitutionTable
                            ) -> tuple[str, list[str]]:
    """Replace every violating-term occurrence in the step via the table.

    Returns (rewritten step, warnings). Non-violating text is preserved
    byte-for-byte; a violating term with no rule is left unchanged and
    reported as an 'unresolved-substitution' warning.
    """
    violations = find_violations(step, lexicon)
    warnings: list[str] = []
    out = step
    for (start, end), term in reversed(violations):
        original = out[start:end]
        replaced = substitute_term(original, constraint, table)
        if replaced == original:
            warnings.append(f"unresolved-substitution: {term!r}")
        else:
            out = out[:start] + replaced + out[end:]
    return out, warnings


def build_rule_prompt(step: str, recipe: Recipe, constraint: str,
                      lexicon: ConstraintLexicon, table: SubstitutionTable,
                      lists: StripLists) -> list[str]:
    """Ingredient terms for a step-level prompt: extract the step's
    ingredients, substitute any that violate the constraint, keep step
    order. May be empty."""
    terms: list[str] = []
    for mention in extract_step_ingredients(step, recipe, lists):
        core = " ".join(strip_core_tokens(
            recipe.ingredients[mention.ingredient_index], lists))
        terms.append(substitute_term(core, constraint, table))
    return terms
