"""Automatic metrics and tabular reporting.

Four metric groups per strategy: perplexity (only when a generator service
is configured), ingredient adherence percentage, ROUGE-L recall against the
source, and distinct-trigram diversity. Diversity is reported both as the
per-recipe mean and pooled over the whole run, since either aggregation is
defensible. All metrics share the package tokenizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from recipe_rewriter.corpus import Corpus, Recipe
from recipe_rewriter.diet import ConstraintLexicon, FoodList, adherence_pct
from recipe_rewriter.kernels import lcs_length
from recipe_rewriter.rewrite import Generator, RewriteResult
from recipe_rewriter.textnorm import tokenize


class EvaluationError(Exception):
    pass


def rouge_l_recall(reference: str, candidate: str) -> float:
    """LCS(reference tokens, candidate tokens) / |reference tokens|;
    an empty reference scores 1.0."""
    ref_tokens = tokenize(reference)
    if not ref_tokens:
        return 1.0
    cand_tokens = tokenize(candidate)
    return lcs_length(ref_tokens, cand_tokens) / len(ref_tokens)


def _trigrams(tokens: Sequence[str]) -> list[tuple[str, str, str]]:
    return [tuple(tokens[i:i + 3]) for i in range(len(tokens) - 2)]


def trigram_diversity(text: str) -> float:
    """Distinct token trigrams over total; texts under 3 tokens score 1.0."""
    tokens = tokenize(text)
    grams = _trigrams(tokens)
    if not grams:
        return 1.0
    return len(set(grams)) / len(grams)


@dataclass(frozen=True)
class StrategyRow:
    strategy: str
    n_documents: int
    adherence_pct: float
    rouge_l_recall: float
    trigram_diversity: float           # per-recipe mean
    trigram_diversity_pooled: float
    perplexity: float | None = None


@dataclass(frozen=True)
class BreakdownRow:
    strategy: str
    constraint: str
    n_documents: int
    adherence_pct: float


@dataclass(frozen=True)
class MetricReport:
    rows: tuple[StrategyRow, ...]
    breakdown: tuple[BreakdownRow, ...] = ()


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def evaluate_run(results: Sequence[RewriteResult], sources: Corpus,
                 lexicons: Mapping[str, ConstraintLexicon], foods: FoodList,
                 generator: Generator | None = None) -> MetricReport:
    """Aggregate metrics per strategy with a per-constraint adherence
    breakdown. Order of results does not affect the report."""
    by_id = sources.by_id()
    missing = sorted({r.source_id for r in results if r.source_id not in by_id})
    if missing:
        raise EvaluationError(f"unresolvable source ids: {', '.join(missing)}")

    per_strategy: dict[str, list[dict]] = {}
    for result in results:
        source = by_id[result.source_id]
        lexicon = lexicons.get(result.constraint)
        if lexicon is None:
            raise EvaluationError(
                f"no lexicon provided for constraint {result.constraint!r}")
        rewrite_text = " ".join(result.steps)
        rewritten = Recipe(id=result.source_id, title=source.title,
                           ingredients=(), steps=tuple(result.steps))
        entry = {
            "constraint": result.constraint,
            "adherence": adherence_pct(rewritten, lexicon, foods),
            "rouge": rouge_l_recall(" ".join(source.steps), rewrite_text),
            "diversity": trigram_diversity(rewrite_text),
            "trigrams": _trigrams(tokenize(rewrite_text)),
        }
        if generator is not None:
            entry["ppl"] = generator.perplexity(rewrite_text)
        per_strategy.setdefault(result.strategy, []).append(entry)

    rows = []
    breakdown = []
    for strategy in sorted(per_strategy):
        entries = per_strategy[strategy]
        pooled = [g for e in entries for g in e["trigrams"]]
        rows.append(StrategyRow(
            strategy=strategy,
            n_documents=len(entries),
            adherence_pct=_mean([e["adherence"] for e in entries]),
            rouge_l_recall=_mean([e["rouge"] for e in entries]),
            trigram_diversity=_mean([e["diversity"] for e in entries]),
            trigram_diversity_pooled=(len(set(pooled)) / len(pooled)
                                      if pooled else 1.0),
            perplexity=(_mean([e["ppl"] for e in entries])
                        if generator is not None else None),
        ))
        by_constraint: dict[str, list[float]] = {}
        for e in entries:
            by_constraint.setdefault(e["constraint"], []).append(e["adherence"])
        for constraint in sorted(by_constraint):
            breakdown.append(BreakdownRow(
                strategy, constraint, len(by_constraint[constraint]),
                _mean(by_constraint[constraint])))
    return MetricReport(tuple(rows), tuple(breakdown))


_COLUMNS = ("strategy", "docs", "perplexity", "adherence%", "rouge-l",
            "diversity", "diversity-pooled")


def emit_report(report: MetricReport, fmt: str = "text-table") -> bytes:
    """Render a report. 'text-table' is fixed-width for humans; 'machine'
    is JSON and round-trips through parse_report."""
    if fmt == "machine":
        payload = {
            "rows": [{
                "strategy": r.strategy,
                "n_documents": r.n_documents,
                "perplexity": r.perplexity,
                "adherence_pct": r.adherence_pct,
                "rouge_l_recall": r.rouge_l_recall,
                "trigram_diversity": r.trigram_diversity,
                "trigram_diversity_pooled": r.trigram_diversity_pooled,
            } for r in report.rows],
            "breakdown": [{
                "strategy": b.strategy,
                "constraint": b.constraint,
                "n_documents": b.n_documents,
                "adherence_pct": b.adherence_pct,
            } for b in report.breakdown],
        }
        return (json.dumps(payload, ensure_ascii=False, sort_keys=True,
                           indent=2) + "\n").encode("utf-8")
    if fmt != "text-table":
        raise EvaluationError(f"unknown report format {fmt!r}")

    widths = [24, 6, 10, 10, 8, 9, 16]
    lines = ["  ".join(c.ljust(w) for c, w in zip(_COLUMNS, widths)).rstrip()]
    for r in report.rows:
        ppl = "-" if r.perplexity is None else f"{r.perplexity:.2f}"
        cells = (r.strategy, str(r.n_documents), ppl,
                 f"{r.adherence_pct:.1f}", f"{r.rouge_l_recall:.4f}",
                 f"{r.trigram_diversity:.3f}",
                 f"{r.trigram_diversity_pooled:.3f}")
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
    if report.breakdown:
        lines.append("")
        lines.append("adherence by constraint:")
        for b in report.breakdown:
            lines.append(f"  {b.strategy}  {b.constraint}  "
                         f"{b.adherence_pct:.1f}  (n={b.n_documents})")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_report(data: bytes) -> MetricReport:
    """Inverse of emit_report(..., 'machine')."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise EvaluationError(f"bad machine report: {exc}") from exc
    rows = tuple(StrategyRow(
        strategy=r["strategy"],
        n_documents=r["n_documents"],
        adherence_pct=r["adherence_pct"],
        rouge_l_recall=r["rouge_l_recall"],
        trigram_diversity=r["trigram_diversity"],
        trigram_diversity_pooled=r["trigram_diversity_pooled"],
        perplexity=r.get("perplexity"),
    ) for r in payload.get("rows", []))
    breakdown = tuple(BreakdownRow(
        strategy=b["strategy"],
        constraint=b["constraint"],
        n_documents=b["n_documents"],
        adherence_pct=b["adherence_pct"],
    ) for b in payload.get("breakdown", []))
    return MetricReport(rows, breakdown)
