"""Pipeline entry point: ingest -> tag -> align -> format -> rewrite ->
evaluate -> report, with a shared JSON config file.

Every stage writes its outputs atomically (temp file + rename) together
with a ``<out>.manifest.json`` recording the stage, the SHA-256 of each
input, and the effective parameters, so identical config + inputs + seed
reproduce identical artifact bytes for all non-generator stages (and for
generator stages when the stub or a seeded service is used).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

from recipe_rewriter import align as align_mod
from recipe_rewriter import promptfmt
from recipe_rewriter import resources
from recipe_rewriter import rewrite as rewrite_mod
from recipe_rewriter.corpus import (
    Corpus,
    CorpusError,
    filter_valid,
    parse_corpus,
    serialize_corpus,
)
from recipe_rewriter.diet import CONSTRAINTS, load_food_list, load_lexicon, tag_recipe
from recipe_rewriter.evaluate import emit_report, evaluate_run, parse_report
from recipe_rewriter.extract import extract_step_ingredients, load_strip_lists, strip_core_tokens
from recipe_rewriter.substitute import load_substitutions

GENERATOR_URL_ENV = "RECIPE_REWRITER_GENERATOR_URL"

STAGE_OF_ARTIFACT = {
    "corpus": "ingest",
    "pairs": "align",
    "results": "rewrite",
}


class PipelineError(Exception):
    pass


class PipelineConfig:
    """Paths plus align/decode parameters; unset paths fall back to the
    packaged starter configuration."""

    def __init__(self, obj: dict | None = None, base: Path | None = None):
        obj = obj or {}
        self.paths = dict(obj.get("paths", {}))
        if base is not None:
            self.paths = {k: str((base / v)) for k, v in self.paths.items()}
        align_cfg = obj.get("align", {})
        self.tau = float(align_cfg.get("tau", align_mod.DEFAULT_TAU))
        self.scorer = align_cfg.get("scorer", "rouge-l-f1")
        if not 0.0 <= self.tau <= 100.0:
            raise PipelineError(f"align.tau must be in [0, 100], got {self.tau}")
        try:
            self.decode = rewrite_mod.DecodeParams(**obj.get("decode", {}))
        except TypeError as exc:
            raise PipelineError(f"bad decode parameters: {exc}") from exc
        self.seed = obj.get("seed", 0)
        for key, path in self.paths.items():
            if not Path(path).exists():
                raise PipelineError(f"config path {key!r} does not exist: {path}")

    @staticmethod
    def load(path: str | None) -> "PipelineConfig":
        if path is None:
            return PipelineConfig()
        p = Path(path)
        if not p.exists():
            raise PipelineError(f"config file not found: {path}")
        return PipelineConfig(json.loads(p.read_text("utf-8")), base=p.parent)

    def digest(self) -> str:
        payload = json.dumps({
            "paths": self.paths, "tau": self.tau, "scorer": self.scorer,
            "decode": vars(self.decode), "seed": self.seed,
        }, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    # --- resource loading with packaged fallbacks ---

    def lexicon(self, constraint: str, override: str | None = None):
        path = override or self.paths.get(f"lexicon.{constraint}")
        if path is None:
            return resources.default_lexicon(constraint)
        with open(path, "rb") as fh:
            return load_lexicon(fh)

    def lexicons(self):
        return {c: self.lexicon(c) for c in CONSTRAINTS}

    def strip_lists(self):
        path = self.paths.get("strip_lists")
        if path is None:
            return resources.default_strip_lists()
        with open(path, "rb") as fh:
            return load_strip_lists(fh)

    def foods(self):
        path = self.paths.get("foods")
        if path is None:
            return resources.default_food_list()
        with open(path, "rb") as fh:
            return load_food_list(fh)

    def substitutions(self, lexicons=None):
        path = self.paths.get("substitutions")
        if path is None:
            return resources.default_substitutions(lexicons)
        with open(path, "rb") as fh:
            return load_substitutions(
                fh, lexicons if lexicons is not None
                else self.lexicons())

    def dictionary(self):
        path = self.paths.get("dictionary")
        if path is None:
            return frozenset()
        with open(path, "rb") as fh:
            return rewrite_mod.load_dictionary(fh)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write(path: str, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(stage: str, out_path: str, inputs: list[str],
                    params: dict, config: PipelineConfig):
    manifest = {
        "stage": stage,
        "inputs": {p: _sha256(p) for p in sorted(inputs)},
        "params": params,
        "config_digest": config.digest(),
    }
    _atomic_write(out_path + ".manifest.json",
                  (json.dumps(manifest, sort_keys=True, indent=2) + "\n")
                  .encode("utf-8"))


def _require_artifact(path: str, artifact: str):
    if not Path(path).exists():
        stage = STAGE_OF_ARTIFACT.get(artifact)
        hint = f"; run the `{stage}` stage first" if stage else ""
        raise PipelineError(f"missing {artifact} file: {path}{hint}")


def _load_corpus(path: str) -> Corpus:
    _require_artifact(path, "corpus")
    with open(path, "rb") as fh:
        corpus, _ = parse_corpus(fh)
    return corpus


def _load_pairs(path: str) -> list[align_mod.RecipePair]:
    _require_artifact(path, "pairs")
    with open(path, "rb") as fh:
        return [align_mod.pair_from_json(line.decode("utf-8"))
                for line in fh if line.strip()]


# --- stages ---

def stage_ingest(config: PipelineConfig, args) -> int:
    if not Path(args.infile).exists():
        raise PipelineError(f"input corpus not found: {args.infile}")
    with open(args.infile, "rb") as fh:
        corpus, skips = parse_corpus(fh)
    kept, dropped = filter_valid(corpus.recipes)
    provenance: dict[str, int] = {}
    for recipe in kept:
        key = recipe.source or "unknown"
        provenance[key] = provenance.get(key, 0) + 1
    _atomic_write(args.out, serialize_corpus(Corpus(tuple(kept), provenance)))
    if args.report:
        report = {
            "parsed": len(corpus.recipes),
            "kept": len(kept),
            "dropped": [{"id": r.id, "reason": reason} for r, reason in dropped],
            "skipped_lines": [{"line": n, "error": e} for n, e in skips.skipped],
        }
        _atomic_write(args.report,
                      (json.dumps(report, sort_keys=True, indent=2) + "\n")
                      .encode("utf-8"))
    _write_manifest("ingest", args.out, [args.infile], {}, config)
    print(f"ingest: kept {len(kept)} of {len(corpus.recipes)} recipes "
          f"({len(skips)} malformed lines skipped)")
    return 0


def stage_tag(config: PipelineConfig, args) -> int:
    corpus = _load_corpus(args.corpus)
    lexicon = config.lexicon(args.constraint, args.lexicon)
    lines = []
    for recipe in corpus.recipes:
        tag = tag_recipe(recipe, lexicon)
        lines.append(json.dumps({
            "id": recipe.id,
            "constraint": tag.constraint,
            "status": tag.status,
            "violations": [{"ingredient_index": i, "term": t}
                           for i, t in tag.violations],
        }, ensure_ascii=False, sort_keys=True))
    _atomic_write(args.out, ("\n".join(lines) + "\n").encode("utf-8"))
    inputs = [args.corpus] + ([args.lexicon] if args.lexicon else [])
    _write_manifest("tag", args.out, inputs,
                    {"constraint": args.constraint}, config)
    print(f"tag: wrote {len(lines)} tags for {args.constraint}")
    return 0


def stage_align(config: PipelineConfig, args) -> int:
    corpus = _load_corpus(args.corpus)
    lexicon = config.lexicon(args.constraint, args.lexicon)
    lists = config.strip_lists()
    tau = args.tau if args.tau is not None else config.tau
    align_config = align_mod.AlignConfig(threshold=tau, scorer=config.scorer)
    pairs = []
    for group in align_mod.group_dishes(corpus, lists):
        pairs.extend(align_mod.make_pairs(group, args.constraint, lexicon,
                                          align_config))
    payload = "".join(align_mod.pair_to_json(p) + "\n" for p in pairs)
    _atomic_write(args.out, payload.encode("utf-8"))
    _write_manifest("align", args.out, [args.corpus],
                    {"constraint": args.constraint, "tau": tau}, config)
    print(f"align: wrote {len(pairs)} pairs (tau={tau})")
    return 0


def _pair_records(pair: align_mod.RecipePair, kind: str, lists
                  ) -> list[promptfmt.PromptRecord]:
    records = []
    if kind == "end-to-end":
        return [promptfmt.PromptRecord(
            kind, pair.constraint, pair.source.title,
            src_ingredients=tuple(pair.source.ingredients),
            src_steps=tuple(pair.source.steps),
            tgt_title=pair.target.title,
            tgt_ingredients=tuple(pair.target.ingredients),
            tgt_steps=tuple(pair.target.steps))]
    for alignment in pair.alignments:
        n = alignment.src_index
        merged = align_mod.merged_target_text(pair, alignment)
        first_tgt = alignment.tgt_indices[0]
        if kind == "no-context":
            records.append(promptfmt.PromptRecord(
                kind, pair.constraint, pair.source.title,
                src_steps=(pair.source.steps[n - 1],), tgt_step=merged))
            continue
        base = dict(
            constraint=pair.constraint,
            src_title=pair.source.title,
            src_ingredients=tuple(pair.source.ingredients),
            src_steps=tuple(pair.source.steps[:n]),
            tgt_steps=tuple(pair.target.steps[:first_tgt - 1]),
            tgt_step=merged)
        if kind == "contextual":
            records.append(promptfmt.PromptRecord(kind, **base))
        else:  # prompted: the target step's own ingredients form the prompt
            mentions = extract_step_ingredients(merged, pair.target, lists)
            terms = tuple(
                " ".join(strip_core_tokens(
                    pair.target.ingredients[m.ingredient_index], lists))
                for m in mentions)
            records.append(promptfmt.PromptRecord(
                kind, prompt_ingredients=terms, **base))
    return records


def _ingpred_records(corpus: Corpus, lists) -> list[promptfmt.PromptRecord]:
    records = []
    for recipe in corpus.recipes:
        for n, step in enumerate(recipe.steps, start=1):
            mentions = extract_step_ingredients(step, recipe, lists)
            terms = tuple(
                " ".join(strip_core_tokens(
                    recipe.ingredients[m.ingredient_index], lists))
                for m in mentions)
            records.append(promptfmt.PromptRecord(
                "ing-pred", None, recipe.title,
                src_ingredients=tuple(recipe.ingredients),
                src_steps=tuple(recipe.steps[:n - 1]),
                prompt_ingredients=terms))
    return records


def stage_format(config: PipelineConfig, args) -> int:
    lists = config.strip_lists()
    if args.kind == "ing-pred":
        if not args.corpus:
            raise PipelineError("format --kind ing-pred needs --corpus")
        records = _ingpred_records(_load_corpus(args.corpus), lists)
        inputs = [args.corpus]
    else:
        if not args.pairs:
            raise PipelineError(f"format --kind {args.kind} needs --pairs")
        records = []
        for pair in _load_pairs(args.pairs):
            records.extend(_pair_records(pair, args.kind, lists))
        inputs = [args.pairs]
    lines = [json.dumps({"kind": args.kind,
                         "text": promptfmt.serialize(r).text},
                        ensure_ascii=False, sort_keys=True)
             for r in records]
    _atomic_write(args.out, ("\n".join(lines) + "\n").encode("utf-8")
                  if lines else b"")
    _write_manifest("format", args.out, inputs, {"kind": args.kind}, config)
    print(f"format: wrote {len(records)} {args.kind} records")
    return 0


def _make_generator(config: PipelineConfig, url: str | None):
    url = url or os.environ.get(GENERATOR_URL_ENV)
    if url:
        return rewrite_mod.HttpGeneratorClient(url, config.decode)
    return rewrite_mod.EchoStubGenerator()


def stage_rewrite(config: PipelineConfig, args) -> int:
    pairs = [p for p in _load_pairs(args.pairs)
             if p.constraint == args.constraint]
    lexicons = config.lexicons()
    lexicon = lexicons[args.constraint]
    deps = rewrite_mod.RewriteDeps(
        lexicon=lexicon,
        generator=_make_generator(config, args.generator),
        table=config.substitutions(lexicons),
        strip_lists=config.strip_lists(),
        dictionary=config.dictionary(),
        decode=config.decode,
        seed=config.seed,
    )
    if args.strategy == "retrieval":
        deps.corpus = Corpus(tuple({p.source.id: p.source for p in pairs}.values())
                             + tuple({p.target.id: p.target for p in pairs}.values()))
    results = []
    seen: set[str] = set()
    for pair in pairs:
        if pair.source.id in seen:
            continue
        seen.add(pair.source.id)
        results.append(rewrite_mod.rewrite_document(
            pair.source, args.constraint, args.strategy, deps))
    _atomic_write(args.out, rewrite_mod.write_results(results))
    _write_manifest("rewrite", args.out, [args.pairs],
                    {"constraint": args.constraint, "strategy": args.strategy,
                     "seed": config.seed}, config)
    print(f"rewrite: {len(results)} documents via {args.strategy}")
    return 0


def stage_evaluate(config: PipelineConfig, args) -> int:
    _require_artifact(args.results, "results")
    with open(args.results, "rb") as fh:
        results = rewrite_mod.read_results(fh)
    corpus = _load_corpus(args.corpus)
    generator = None
    url = args.generator or os.environ.get(GENERATOR_URL_ENV)
    if url:
        generator = rewrite_mod.HttpGeneratorClient(url, config.decode)
    report = evaluate_run(results, corpus, config.lexicons(), config.foods(),
                          generator)
    _atomic_write(args.report, emit_report(report, args.format))
    _write_manifest("evaluate", args.report, [args.results, args.corpus],
                    {"format": args.format}, config)
    print(f"evaluate: {len(report.rows)} strategy rows -> {args.report}")
    return 0


def stage_report(config: PipelineConfig, args) -> int:
    if not Path(args.infile).exists():
        raise PipelineError(f"missing machine report: {args.infile}; "
                            "run the `evaluate` stage first")
    report = parse_report(Path(args.infile).read_bytes())
    rendered = emit_report(report, "text-table")
    if args.out:
        _atomic_write(args.out, rendered)
    else:
        sys.stdout.write(rendered.decode("utf-8"))
    return 0


STAGES = {
    "ingest": stage_ingest,
    "tag": stage_tag,
    "align": stage_align,
    "format": stage_format,
    "rewrite": stage_rewrite,
    "evaluate": stage_evaluate,
    "report": stage_report,
}


def run_stage(stage: str, config: PipelineConfig, args) -> int:
    if stage not in STAGES:
        raise PipelineError(f"unknown stage {stage!r}")
    return STAGES[stage](config, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recipe-rewriter",
        description="Dietary-constraint recipe pipeline")
    parser.add_argument("--config", help="pipeline config JSON")
    sub = parser.add_subparsers(dest="stage", required=True)

    p = sub.add_parser("ingest", help="parse and filter a raw corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report")

    p = sub.add_parser("tag", help="tag recipes valid/invalid")
    p.add_argument("--corpus", required=True)
    p.add_argument("--constraint", required=True, choices=CONSTRAINTS)
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)

    p = sub.add_parser("align", help="build aligned recipe pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--constraint", required=True, choices=CONSTRAINTS)
    p.add_argument("--tau", type=float)
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)

    p = sub.add_parser("format", help="emit serialized prompt records")
    p.add_argument("--pairs")
    p.add_argument("--corpus")
    p.add_argument("--kind", required=True, choices=promptfmt.KINDS)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rewrite", help="rewrite paired source recipes")
    p.add_argument("--pairs", required=True)
    p.add_argument("--strategy", required=True,
                   choices=rewrite_mod.STRATEGIES)
    p.add_argument("--constraint", required=True, choices=CONSTRAINTS)
    p.add_argument("--generator", help="generator service URL "
                   f"(or ${GENERATOR_URL_ENV})")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="compute automatic metrics")
    p.add_argument("--results", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--generator")
    p.add_argument("--report", required=True)
    p.add_argument("--format", default="text-table",
                   choices=("text-table", "machine"))

    p = sub.add_parser("report", help="render a machine report as a table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = PipelineConfig.load(args.config)
        return run_stage(args.stage, config, args)
    except (PipelineError, CorpusError, rewrite_mod.RewriteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
