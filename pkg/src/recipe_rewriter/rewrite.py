"""Document-level rewrite orchestration.

The step-wise strategies rewrite a source recipe one step at a time: the
prompt for step n carries the full source context plus the n-1 previously
selected outputs, so steps within a document are strictly sequential.
Candidates come from a generator service (or a deterministic stub) and one
is picked by a conjunctive filter with a relaxation ladder; dietary
validity is the one criterion that is never relaxed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Protocol, Sequence

import requests

from recipe_rewriter import promptfmt
from recipe_rewriter.align import dish_key, score_step_pair
from recipe_rewriter.corpus import Corpus, Recipe
from recipe_rewriter.diet import ConstraintLexicon, find_violations
from recipe_rewriter.extract import StripLists
from recipe_rewriter.substitute import (
    SubstitutionTable,
    build_rule_prompt,
    rewrite_step_rule_based,
    substitute_term,
)
from recipe_rewriter.textnorm import clean_span, tokenize

STRATEGIES = (
    "rule-based",
    "retrieval",
    "contextual",
    "contextual+rule-prompt",
    "contextual+pred-prompt",
    "end-to-end",
    "no-context",
)

STEPWISE_STRATEGIES = (
    "contextual",
    "contextual+rule-prompt",
    "contextual+pred-prompt",
    "no-context",
)

_SPECIAL_CHARS = ("%", "*", "$")
_PUNCTUATION = set(".,;:!?)\"'")


class RewriteError(Exception):
    pass


class GeneratorTransportError(RewriteError):
    """Generator endpoint unreachable or misbehaving."""


class RetrievalMissError(RewriteError):
    """No valid same-dish recipe available to retrieve."""


@dataclass(frozen=True)
class DecodeParams:
    top_k: int = 40
    nucleus: float = 1.0
    temperature: float = 1.0
    n_candidates: int = 10
    max_new_tokens: int = 128


class Generator(Protocol):
    def generate(self, prompt: str, stop_token: str, n_candidates: int,
                 seed: int | None = None) -> list[str]: ...

    def perplexity(self, text: str) -> float: ...


class HttpGeneratorClient:
    """Client for the generator wire protocol.

    POST /generate   {prompt, n_candidates, max_new_tokens, top_k, nucleus,
                      temperature, stop_token, seed?} -> {candidates: [...]}
    POST /perplexity {text} -> {ppl}
    GET  /health     -> {ok}
    """

    def __init__(self, endpoint: str,
                 decode_params: DecodeParams = DecodeParams(),
                 timeout: float = 120.0):
        self.endpoint = endpoint.rstrip("/")
        self.decode_params = decode_params
        self.timeout = timeout

    def _post(self, path: str, body: dict) -> dict:
        try:
            response = requests.post(self.endpoint + path, json=body,
                                     timeout=self.timeout)
            response.raise_for_status()
            return response.json()
        except requests.RequestException as exc:
            raise GeneratorTransportError(
                f"generator request {path} failed: {exc}") from exc

    def generate(self, prompt: str, stop_token: str, n_candidates: int,
                 seed: int | None = None) -> list[str]:
        body = {
            "prompt": prompt,
            "n_candidates": n_candidates,
            "max_new_tokens": self.decode_params.max_new_tokens,
            "top_k": self.decode_params.top_k,
            "nucleus": self.decode_params.nucleus,
            "temperature": self.decode_params.temperature,
            "stop_token": stop_token,
        }
        if seed is not None:
            body["seed"] = seed
        payload = self._post("/generate", body)
        return [str(c) for c in payload["candidates"]]

    def perplexity(self, text: str) -> float:
        return float(self._post("/perplexity", {"text": text})["ppl"])

    def health(self) -> bool:
        try:
            response = requests.get(self.endpoint + "/health",
                                    timeout=self.timeout)
            return response.ok and bool(response.json().get("ok"))
        except requests.RequestException:
            return False


class EchoStubGenerator:
    """Deterministic offline generator: echoes the source step found in the
    prompt. Lets the whole pipeline run without a model service."""

    def generate(self, prompt: str, stop_token: str, n_candidates: int,
                 seed: int | None = None) -> list[str]:
        source_side = prompt.split(promptfmt.ENDOFINST)[0]
        segments = [s.strip() for s in source_side.split(promptfmt.INST)]
        last = segments[-1] if segments else ""
        # drop any leading grammar tokens before the step text
        if "> " in last:
            last = last.rsplit("> ", 1)[-1]
        return [last] * n_candidates

    def perplexity(self, text: str) -> float:
        # stable pseudo-perplexity so offline evaluation stays deterministic
        tokens = tokenize(text)
        if not tokens:
            return 1.0
        return 1.0 + len(set(tokens)) / len(tokens)


class RecordingGenerator:
    """Wraps a generator and records every prompt it receives."""

    def __init__(self, inner: Generator):
        self.inner = inner
        self.prompts: list[str] = []

    def generate(self, prompt: str, stop_token: str, n_candidates: int,
                 seed: int | None = None) -> list[str]:
        self.prompts.append(prompt)
        return self.inner.generate(prompt, stop_token, n_candidates, seed)

    def perplexity(self, text: str) -> float:
        return self.inner.perplexity(text)


@dataclass(frozen=True)
class StepCandidates:
    step_index: int
    candidates: tuple[str, ...]
    selected: int
    rejection_log: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class RewriteResult:
    source_id: str
    constraint: str
    strategy: str
    steps: tuple[str, ...]
    per_step: tuple[StepCandidates, ...] = ()
    warnings: tuple[str, ...] = ()

    def to_json(self) -> str:
        return json.dumps({
            "source_id": self.source_id,
            "constraint": self.constraint,
            "strategy": self.strategy,
            "steps": list(self.steps),
            "per_step": [{
                "step_index": p.step_index,
                "candidates": list(p.candidates),
                "selected": p.selected,
                "rejection_log": [list(r) for r in p.rejection_log],
            } for p in self.per_step],
            "warnings": list(self.warnings),
        }, ensure_ascii=False, sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "RewriteResult":
        obj = json.loads(line)
        return RewriteResult(
            source_id=obj["source_id"],
            constraint=obj["constraint"],
            strategy=obj["strategy"],
            steps=tuple(obj["steps"]),
            per_step=tuple(StepCandidates(
                step_index=p["step_index"],
                candidates=tuple(p["candidates"]),
                selected=p["selected"],
                rejection_log=tuple(tuple(r) for r in p["rejection_log"]),
            ) for p in obj.get("per_step", [])),
            warnings=tuple(obj.get("warnings", [])),
        )


@dataclass
class RewriteDeps:
    lexicon: ConstraintLexicon
    generator: Generator | None = None
    table: SubstitutionTable | None = None
    corpus: Corpus | None = None
    strip_lists: StripLists | None = None
    dictionary: frozenset[str] = frozenset()
    decode: DecodeParams = field(default_factory=DecodeParams)
    seed: int | None = None


def load_dictionary(stream: BinaryIO | Iterable[bytes]) -> frozenset[str]:
    words = set()
    for raw in stream:
        word = clean_span(raw.decode("utf-8")).lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


CRITERION_VIOLATIONS = "violating-ingredients"
CRITERION_LENGTH = "too-long"
CRITERION_SPECIAL = "special-characters"
CRITERION_CAPITALIZED = "first-not-capitalized"
CRITERION_PUNCTUATION = "last-not-punctuation"
CRITERION_DICTIONARY = "non-dictionary-word"

# weakest last; the relaxation ladder drops from the tail, never the head
_CRITERIA_ORDER = (
    CRITERION_VIOLATIONS,
    CRITERION_LENGTH,
    CRITERION_SPECIAL,
    CRITERION_CAPITALIZED,
    CRITERION_PUNCTUATION,
    CRITERION_DICTIONARY,
)

NO_VALID_CANDIDATE = "no-valid-candidate"


def _failed_criteria(candidate: str, lexicon: ConstraintLexicon,
                     dictionary: frozenset[str]) -> tuple[str, ...]:
    failed = []
    if find_violations(candidate, lexicon):
        failed.append(CRITERION_VIOLATIONS)
    if len(candidate) >= 100:
        failed.append(CRITERION_LENGTH)
    if any(ch in candidate for ch in _SPECIAL_CHARS):
        failed.append(CRITERION_SPECIAL)
    if not candidate or not candidate[0].isupper():
        failed.append(CRITERION_CAPITALIZED)
    if not candidate or candidate[-1] not in _PUNCTUATION:
        failed.append(CRITERION_PUNCTUATION)
    if dictionary:
        alpha_tokens = [t for t in tokenize(candidate) if t.isalpha()]
        if any(t not in dictionary for t in alpha_tokens):
            failed.append(CRITERION_DICTIONARY)
    return tuple(failed)


@dataclass(frozen=True)
class Selection:
    index: int
    rejection_log: tuple[tuple[str, ...], ...]
    warning: str | None = None


def select_candidate(candidates: Sequence[str], constraint: str,
                     lexicon: ConstraintLexicon,
                     dictionary: frozenset[str]) -> Selection:
    """Pick the first candidate passing all six criteria; when none does,
    relax criteria one at a time from the weakest (dictionary) backward,
    never relaxing dietary validity; as a last resort return the first
    candidate with a warning."""
    if not candidates:
        raise RewriteError("select_candidate needs at least one candidate")
    log = tuple(_failed_criteria(c, lexicon, dictionary) for c in candidates)
    for n_active in range(len(_CRITERIA_ORDER), 0, -1):
        active = set(_CRITERIA_ORDER[:n_active])
        for i, failed in enumerate(log):
            if not active.intersection(failed):
                return Selection(i, log)
    return Selection(0, log, warning=NO_VALID_CANDIDATE)


def _clean_candidate(text: str) -> str:
    """Cut a raw completion at the first grammar token and tidy whitespace."""
    m = promptfmt._TOKEN_RE.search(text)
    if m:
        text = text[:m.start()]
    return clean_span(text)


def predict_prompt_ingredients(record: promptfmt.PromptRecord,
                               generator: Generator
                               ) -> tuple[list[str], list[str]]:
    """Ask the generator to predict next-step ingredients from an ing-pred
    context. Returns (terms, warnings); <noings> or an empty completion
    yield an empty list."""
    if record.kind != "ing-pred":
        raise RewriteError("predict_prompt_ingredients needs an ing-pred record")
    rendered = promptfmt.serialize(record, promptfmt.INFERENCE)
    completion = generator.generate(rendered.text, rendered.stop_token, 1)[0]
    completion = completion.split(promptfmt.END)[0]
    if promptfmt.NOINGS in completion:
        return [], []
    terms = [clean_span(t) for t in completion.split(promptfmt.ING)]
    terms = [t for t in terms if t and not promptfmt._TOKEN_RE.search(t)]
    if not terms:
        return [], ["empty-ingredient-prediction"]
    return terms, []


def retrieval_rewrite(source: Recipe, constraint: str, corpus: Corpus,
                      lexicon: ConstraintLexicon,
                      lists: StripLists) -> Recipe:
    """Return the valid same-dish recipe lexically closest to the source
    (surrogate scorer on concatenated steps); ties break on recipe id."""
    from recipe_rewriter.diet import VALID, tag_recipe

    key = dish_key(source.title, lists)
    source_text = " ".join(source.steps)
    best: tuple[float, str, Recipe] | None = None
    for candidate in corpus.recipes:
        if candidate.id == source.id:
            continue
        if dish_key(candidate.title, lists) != key:
            continue
        if tag_recipe(candidate, lexicon).status != VALID:
            continue
        score = score_step_pair(source_text, " ".join(candidate.steps))
        entry = (-score, candidate.id, candidate)
        if best is None or entry < best:
            best = entry
    if best is None:
        raise RetrievalMissError(
            f"no valid recipe for dish {key!r} under {constraint!r}")
    return best[2]


def _generate_step(generator: Generator, rendered: promptfmt.RenderedPrompt,
                   n_candidates: int, seed: int | None
                   ) -> tuple[list[str], bool]:
    """One generation call with a single retry on all-empty output."""
    for attempt in range(2):
        call_seed = None if seed is None else seed + attempt
        raw = generator.generate(rendered.text, rendered.stop_token,
                                 n_candidates, call_seed)
        candidates = [c for c in (_clean_candidate(r) for r in raw) if c]
        if candidates:
            return candidates, False
    return [], True


def rewrite_document(source: Recipe, constraint: str, strategy: str,
                     deps: RewriteDeps) -> RewriteResult:
    """Rewrite a whole source recipe under one constraint.

    Step-wise strategies loop n = 1..N rendering the inference prompt with
    the previously selected outputs; rule-based maps the substitution
    rewriter over steps; retrieval returns another recipe's steps wholesale.
    Deterministic given a seeded generator.
    """
    if strategy not in STRATEGIES:
        raise RewriteError(f"unknown strategy {strategy!r}")

    if strategy == "rule-based":
        return _rewrite_rule_based(source, constraint, deps)
    if strategy == "retrieval":
        _need(deps.corpus is not None, "retrieval strategy needs a corpus")
        _need(deps.strip_lists is not None, "retrieval strategy needs strip lists")
        retrieved = retrieval_rewrite(source, constraint, deps.corpus,
                                      deps.lexicon, deps.strip_lists)
        return RewriteResult(source.id, constraint, strategy,
                             steps=tuple(retrieved.steps),
                             warnings=(f"retrieved:{retrieved.id}",))
    _need(deps.generator is not None, f"strategy {strategy!r} needs a generator")
    if strategy == "end-to-end":
        return _rewrite_end_to_end(source, constraint, deps)
    return _rewrite_stepwise(source, constraint, strategy, deps)


def _need(cond: bool, message: str):
    if not cond:
        raise RewriteError(message)


def _rewrite_rule_based(source: Recipe, constraint: str,
                        deps: RewriteDeps) -> RewriteResult:
    _need(deps.table is not None, "rule-based strategy needs a substitution table")
    steps: list[str] = []
    per_step: list[StepCandidates] = []
    warnings: list[str] = []
    for n, step in enumerate(source.steps, start=1):
        rewritten, step_warnings = rewrite_step_rule_based(
            step, constraint, deps.lexicon, deps.table)
        steps.append(rewritten)
        warnings.extend(f"step {n}: {w}" for w in step_warnings)
        per_step.append(StepCandidates(n, (rewritten,), 0, ((),)))
    return RewriteResult(source.id, constraint, "rule-based", tuple(steps),
                         tuple(per_step), tuple(warnings))


def _step_prompt(source: Recipe, constraint: str, strategy: str, n: int,
                 prior: list[str], deps: RewriteDeps
                 ) -> tuple[promptfmt.RenderedPrompt, list[str]]:
    warnings: list[str] = []
    if strategy == "no-context":
        rendered = promptfmt.render_generation_prompt(
            source, constraint, n, prior[:0], kind="no-context")
    elif strategy == "contextual":
        rendered = promptfmt.render_generation_prompt(
            source, constraint, n, prior, kind="contextual")
    else:
        if strategy == "contextual+rule-prompt":
            _need(deps.table is not None, "rule prompt needs a substitution table")
            _need(deps.strip_lists is not None, "rule prompt needs strip lists")
            terms = build_rule_prompt(source.steps[n - 1], source, constraint,
                                      deps.lexicon, deps.table,
                                      deps.strip_lists)
        else:  # contextual+pred-prompt
            context = promptfmt.PromptRecord(
                "ing-pred", None, source.title,
                src_ingredients=tuple(source.ingredients),
                src_steps=tuple(source.steps[:n - 1]))
            terms, pred_warnings = predict_prompt_ingredients(
                context, deps.generator)
            warnings.extend(f"step {n}: {w}" for w in pred_warnings)
        rendered = promptfmt.render_generation_prompt(
            source, constraint, n, prior, prompt_ings=terms, kind="prompted")
    return rendered, warnings


def _rewrite_stepwise(source: Recipe, constraint: str, strategy: str,
                      deps: RewriteDeps) -> RewriteResult:
    steps: list[str] = []
    per_step: list[StepCandidates] = []
    warnings: list[str] = []
    for n in range(1, len(source.steps) + 1):
        rendered, prompt_warnings = _step_prompt(
            source, constraint, strategy, n, steps, deps)
        warnings.extend(prompt_warnings)
        seed = None if deps.seed is None else deps.seed * 1000 + n
        candidates, exhausted = _generate_step(
            deps.generator, rendered, deps.decode.n_candidates, seed)
        if exhausted:
            # placeholder keeps the 1:1 step contract; flagged for review
            warnings.append(f"step {n}: placeholder-step")
            steps.append(source.steps[n - 1])
            per_step.append(StepCandidates(n, (source.steps[n - 1],), 0, ((),)))
            continue
        selection = select_candidate(candidates, constraint, deps.lexicon,
                                     deps.dictionary)
        if selection.warning:
            warnings.append(f"step {n}: {selection.warning}")
        steps.append(candidates[selection.index])
        per_step.append(StepCandidates(n, tuple(candidates), selection.index,
                                       selection.rejection_log))
    return RewriteResult(source.id, constraint, strategy, tuple(steps),
                         tuple(per_step), tuple(warnings))


def _rewrite_end_to_end(source: Recipe, constraint: str,
                        deps: RewriteDeps) -> RewriteResult:
    """Single-shot whole-recipe generation. The target-side prompt needs a
    title and ingredient list; we reuse the source title and substitute the
    source ingredient lines to stay constraint-consistent."""
    warnings: list[str] = []
    if deps.table is not None:
        tgt_ingredients = tuple(substitute_term(i, constraint, deps.table)
                                for i in source.ingredients)
    else:
        tgt_ingredients = tuple(source.ingredients)
        warnings.append("end-to-end: no substitution table; "
                        "target ingredients copied from source")
    record = promptfmt.PromptRecord(
        "end-to-end", constraint, source.title,
        src_ingredients=tuple(source.ingredients),
        src_steps=tuple(source.steps),
        tgt_title=source.title,
        tgt_ingredients=tgt_ingredients)
    rendered = promptfmt.serialize(record, promptfmt.INFERENCE)
    raw = deps.generator.generate(rendered.text, rendered.stop_token, 1,
                                  deps.seed)[0]
    raw = raw.split(promptfmt.END)[0].split(promptfmt.ENDOFINST)[0]
    steps = [clean_span(s) for s in raw.split(promptfmt.INST)]
    steps = [s for s in steps if s and not promptfmt._TOKEN_RE.search(s)]
    # controllable generation stops at the source's step count
    steps = steps[:len(source.steps)]
    if not steps:
        warnings.append("end-to-end: empty generation")
    return RewriteResult(source.id, constraint, "end-to-end", tuple(steps),
                         warnings=tuple(warnings))


def write_results(results: Iterable[RewriteResult]) -> bytes:
    return ("\n".join(r.to_json() for r in results) + "\n").encode("utf-8")


def read_results(stream: BinaryIO | Iterable[bytes]) -> list[RewriteResult]:
    out = []
    for raw in stream:
        line = raw.decode("utf-8").strip()
        if line:
            out.append(RewriteResult.from_json(line))
    return out
