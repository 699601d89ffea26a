import pytest

from recipe_rewriter.corpus import Corpus, Recipe
from recipe_rewriter.evaluate import (
    EvaluationError,
    emit_report,
    evaluate_run,
    parse_report,
    rouge_l_recall,
    trigram_diversity,
)
from recipe_rewriter.rewrite import RewriteResult


def test_rouge_l_recall_bounds():
    assert rouge_l_recall("mix the sugar", "mix the sugar") == 1.0
    assert rouge_l_recall("mix the sugar", "") == 0.0
    assert rouge_l_recall("", "anything") == 1.0
    assert rouge_l_recall("a b c d", "a x c") == 0.5


def test_trigram_diversity():
    assert trigram_diversity("one two") == 1.0
    assert trigram_diversity("a b c d") == 1.0          # 2 distinct of 2
    assert trigram_diversity("a b a b a b a") == pytest.approx(2 / 5)


SOURCES = Corpus((
    Recipe("r1", "Cocoa", ("milk",), ("Pour milk.", "Stir it.")),
    Recipe("r2", "Cocoa", ("milk",), ("Heat milk.", "Serve it.")),
))


def _result(rid, strategy="rule-based", constraint="dairy-free",
            steps=("Pour soymilk.", "Stir it.")):
    return RewriteResult(rid, constraint, strategy, steps)


def test_evaluate_run_groups_by_strategy(lexicons, foods):
    results = [_result("r1"), _result("r2"),
               _result("r1", strategy="retrieval")]
    report = evaluate_run(results, SOURCES, lexicons, foods)
    assert [r.strategy for r in report.rows] == ["retrieval", "rule-based"]
    by = {r.strategy: r for r in report.rows}
    assert by["rule-based"].n_documents == 2
    assert by["rule-based"].perplexity is None
    assert by["rule-based"].adherence_pct == 100.0


def test_evaluate_run_order_invariant(lexicons, foods):
    results = [_result("r1"), _result("r2")]
    a = evaluate_run(results, SOURCES, lexicons, foods)
    b = evaluate_run(list(reversed(results)), SOURCES, lexicons, foods)
    assert a == b


def test_evaluate_run_unknown_id_fails(lexicons, foods):
    with pytest.raises(EvaluationError) as err:
        evaluate_run([_result("ghost")], SOURCES, lexicons, foods)
    assert "ghost" in str(err.value)


def test_evaluate_run_adherence_detects_violations(lexicons, foods):
    bad = [_result("r1", steps=("Pour milk.", "Stir it."))]
    report = evaluate_run(bad, SOURCES, lexicons, foods)
    assert report.rows[0].adherence_pct < 100.0


def test_perplexity_only_with_generator(lexicons, foods):
    class PplGen:
        def generate(self, *a, **k):
            raise AssertionError("not used")

        def perplexity(self, text):
            return 4.5

    report = evaluate_run([_result("r1")], SOURCES, lexicons, foods,
                          generator=PplGen())
    assert report.rows[0].perplexity == 4.5


def test_breakdown_by_constraint(lexicons, foods):
    results = [_result("r1"), _result("r2", constraint="vegan")]
    report = evaluate_run(results, SOURCES, lexicons, foods)
    assert [(b.strategy, b.constraint) for b in report.breakdown] == [
        ("rule-based", "dairy-free"), ("rule-based", "vegan")]


def test_machine_report_roundtrip(lexicons, foods):
    report = evaluate_run([_result("r1")], SOURCES, lexicons, foods)
    blob = emit_report(report, "machine")
    assert parse_report(blob) == report


def test_text_table_mentions_all_columns(lexicons, foods):
    report = evaluate_run([_result("r1")], SOURCES, lexicons, foods)
    text = emit_report(report, "text-table").decode("utf-8")
    for column in ("strategy", "adherence%", "rouge-l", "diversity"):
        assert column in text
    assert "rule-based" in text


def test_bad_report_format_rejected(lexicons, foods):
    report = evaluate_run([_result("r1")], SOURCES, lexicons, foods)
    with pytest.raises(EvaluationError):
        emit_report(report, "yaml")
    with pytest.raises(EvaluationError):
        parse_report(b"not json")
