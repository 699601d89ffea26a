"""Recipe data model, JSONL ingest, and validity filtering.

A corpus file is UTF-8 with one JSON object per line:

    {"id": "...", "title": "...", "ingredients": [...], "steps": [...],
     "source": "..."}

``source`` is optional provenance. All text is NFC-normalized on ingest so
downstream matching is stable.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from recipe_rewriter.textnorm import nfc


class CorpusError(Exception):
    """Problem reading or validating a corpus file."""


class EmptyCorpusError(CorpusError):
    """No parseable records / empty corpus where one is required."""


@dataclass(frozen=True)
class Recipe:
    id: str
    title: str
    ingredients: tuple[str, ...]
    steps: tuple[str, ...]
    source: str | None = None

    def to_json(self) -> str:
        record = {
            "id": self.id,
            "title": self.title,
            "ingredients": list(self.ingredients),
            "steps": list(self.steps),
        }
        if self.source is not None:
            record["source"] = self.source
        return json.dumps(record, ensure_ascii=False, sort_keys=True)


@dataclass(frozen=True)
class Corpus:
    recipes: tuple[Recipe, ...]
    provenance: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.recipes)

    def by_id(self) -> dict[str, Recipe]:
        return {r.id: r for r in self.recipes}


@dataclass(frozen=True)
class CorpusStats:
    recipe_count: int
    median_ingredients: float
    median_steps: float


@dataclass(frozen=True)
class SkipReport:
    """Malformed lines encountered by parse_corpus, by 1-based line number."""
    skipped: tuple[tuple[int, str], ...]

    def __len__(self) -> int:
        return len(self.skipped)


def _recipe_from_obj(obj: dict) -> Recipe:
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    try:
        rid = str(obj["id"])
        title = nfc(str(obj["title"]))
        ingredients = tuple(nfc(str(i)) for i in obj["ingredients"])
        steps = tuple(nfc(str(s)) for s in obj["steps"])
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None
    source = obj.get("source")
    return Recipe(rid, title, ingredients, steps,
                  nfc(str(source)) if source is not None else None)


def parse_corpus(stream: BinaryIO | Iterable[bytes],
                 fmt: str = "jsonl") -> tuple[Corpus, SkipReport]:
    """Parse a line-delimited corpus. Malformed lines are skipped and
    reported, not fatal; zero parseable records raises EmptyCorpusError."""
    if fmt != "jsonl":
        raise CorpusError(f"unknown corpus format {fmt!r}")
    recipes: list[Recipe] = []
    skipped: list[tuple[int, str]] = []
    provenance: dict[str, int] = {}
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            try:
                recipe = _recipe_from_obj(json.loads(line))
            except (ValueError, TypeError) as exc:
                skipped.append((lineno, str(exc)))
                continue
            recipes.append(recipe)
            key = recipe.source or "unknown"
            provenance[key] = provenance.get(key, 0) + 1
    except UnicodeDecodeError as exc:
        raise CorpusError(f"corpus is not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise CorpusError(f"cannot read corpus: {exc}") from exc
    if not recipes:
        raise EmptyCorpusError("no parseable records in corpus stream")
    return Corpus(tuple(recipes), provenance), SkipReport(tuple(skipped))


def serialize_corpus(corpus: Corpus) -> bytes:
    """Inverse of parse_corpus on well-formed input (round-trip safe)."""
    lines = [r.to_json() for r in corpus.recipes]
    return ("\n".join(lines) + "\n").encode("utf-8")


REASON_MISSING_TITLE = "missing-title"
REASON_MISSING_INGREDIENTS = "missing-ingredients"
REASON_TOO_FEW_STEPS = "too-few-steps"


def filter_valid(recipes: Iterable[Recipe]
                 ) -> tuple[list[Recipe], list[tuple[Recipe, str]]]:
    """Keep recipes with a title, a non-empty ingredient list, and at least
    two steps; everything else is dropped with a machine-readable reason."""
    kept: list[Recipe] = []
    dropped: list[tuple[Recipe, str]] = []
    for recipe in recipes:
        if not recipe.title.strip():
            dropped.append((recipe, REASON_MISSING_TITLE))
        elif not any(i.strip() for i in recipe.ingredients):
            dropped.append((recipe, REASON_MISSING_INGREDIENTS))
        elif len(recipe.steps) < 2:
            dropped.append((recipe, REASON_TOO_FEW_STEPS))
        else:
            kept.append(recipe)
    return kept, dropped


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Medians over included recipes; lower median for even counts."""
    if not corpus.recipes:
        raise EmptyCorpusError("cannot compute stats of an empty corpus")
    return CorpusStats(
        recipe_count=len(corpus.recipes),
        median_ingredients=statistics.median_low(
            len(r.ingredients) for r in corpus.recipes),
        median_steps=statistics.median_low(
            len(r.steps) for r in corpus.recipes),
    )
