"""Serialization and parsing of the five training/inference text grammars.

All five formats are flat UTF-8 strings: content spans and separator tokens
joined by single spaces. Separator placement differs per kind and is frozen
by golden-file tests:

- contextual:  source context + all target steps in one <inst> list
- prompted:    target context, then ingredient prompt terms, <endofprompt>,
               target step
- ing-pred:    recipe context, then next-step ingredients (or <noings>);
               carries no constraint tags
- end-to-end:  both whole recipes; ingredients each carry a trailing <ing>
- no-context:  single source step to single target step, title only

Train mode renders the complete record through <|endoftext|>; inference
mode truncates at the point where generation begins. Content is sanitized
so separator-like substrings inside recipe text cannot break the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from recipe_rewriter.corpus import Recipe
from recipe_rewriter.diet import CONSTRAINTS
from recipe_rewriter.textnorm import clean_span

START = "<|startoftext|>"
END = "<|endoftext|>"
ENDOFTITLE = "<endoftitle>"
ING = "<ing>"
ENDOFINGS = "<endofings>"
INST = "<inst>"
ENDOFINST = "<endofinst>"
ENDOFPROMPT = "<endofprompt>"
NOINGS = "<noings>"

KINDS = ("contextual", "prompted", "ing-pred", "end-to-end", "no-context")

TRAIN = "train"
INFERENCE = "inference"

_TOKEN_RE = re.compile(
    r"<\|startoftext\|>|<\|endoftext\|>|<endoftitle>|<endofings>"
    r"|<endofinst>|<endofprompt>|<noings>|<ing>|<inst>"
    r"|<src:non-[a-z-]+>|<tgt:[a-z-]+>")

_SRC_TAG_RE = re.compile(r"<src:non-([a-z-]+)>")
_TGT_TAG_RE = re.compile(r"<tgt:([a-z-]+)>")


class PromptFormatError(Exception):
    """Record violates its kind's grammar invariants."""


class PromptParseError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def src_tag(constraint: str) -> str:
    return f"<src:non-{constraint}>"


def tgt_tag(constraint: str) -> str:
    return f"<tgt:{constraint}>"


def sanitize(text: str) -> str:
    """Collapse whitespace and disarm embedded separator-like substrings by
    swapping their angle brackets for lookalikes, keeping the grammar
    injective."""
    return _TOKEN_RE.sub(lambda m: "‹" + m.group(0)[1:-1] + "›",
                         clean_span(text))


@dataclass(frozen=True)
class PromptRecord:
    kind: str
    constraint: str | None = None
    src_title: str = ""
    src_ingredients: tuple[str, ...] = ()
    src_steps: tuple[str, ...] = ()
    tgt_steps: tuple[str, ...] = ()
    prompt_ingredients: tuple[str, ...] | None = None
    tgt_step: str | None = None
    tgt_title: str | None = None
    tgt_ingredients: tuple[str, ...] | None = None


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    stop_token: str


def _require(cond: bool, message: str):
    if not cond:
        raise PromptFormatError(message)


def _validate(record: PromptRecord, mode: str):
    kind = record.kind
    _require(kind in KINDS, f"unknown kind {record.kind!r}")
    _require(mode in (TRAIN, INFERENCE), f"unknown mode {mode!r}")
    if kind == "ing-pred":
        _require(record.constraint is None,
                 "ing-pred records carry no constraint")
    else:
        _require(record.constraint in CONSTRAINTS,
                 f"invalid constraint {record.constraint!r}")
    _require(bool(record.src_title), "src_title required")
    if kind in ("contextual", "prompted", "ing-pred", "end-to-end"):
        _require(len(record.src_ingredients) >= 1,
                 "at least one source ingredient required")
    if kind == "no-context":
        _require(len(record.src_steps) == 1,
                 "no-context takes exactly one source step")
        _require(not record.src_ingredients and not record.tgt_steps,
                 "no-context carries no ingredient or target-step lists")
    if kind in ("contextual", "prompted"):
        _require(len(record.src_steps) >= 1, "source steps required")
    if kind == "prompted":
        _require(record.prompt_ingredients is not None,
                 "prompted records need a prompt_ingredients list")
    if kind == "ing-pred" and mode == TRAIN:
        _require(record.prompt_ingredients is not None,
                 "ing-pred records need a prompt_ingredients list")
    if kind == "end-to-end":
        _require(bool(record.tgt_title), "end-to-end needs a target title")
        _require(record.tgt_ingredients is not None
                 and len(record.tgt_ingredients) >= 1,
                 "end-to-end needs target ingredients")
    if mode == TRAIN:
        if kind in ("contextual", "prompted", "no-context"):
            _require(record.tgt_step is not None, "tgt_step required in train mode")
        if kind == "end-to-end":
            _require(len(record.tgt_steps) >= 1,
                     "end-to-end needs target steps in train mode")


def _spans(items: Sequence[str], sep: str, *, trailing: bool) -> list[str]:
    parts: list[str] = []
    for i, item in enumerate(items):
        parts.append(sanitize(item))
        if trailing or i < len(items) - 1:
            parts.append(sep)
    return parts


def serialize(record: PromptRecord, mode: str = TRAIN) -> RenderedPrompt:
    """Render a record to its grammar; train mode ends with <|endoftext|>,
    inference mode stops where generation begins."""
    _validate(record, mode)
    kind = record.kind
    parts: list[str] = [START]
    stop = END

    if kind == "ing-pred":
        parts += [sanitize(record.src_title), ENDOFTITLE]
        parts += _spans(record.src_ingredients, ING, trailing=True)
        parts.append(ENDOFINGS)
        parts += _spans(record.src_steps, INST, trailing=False)
        parts.append(ENDOFINST)
        if mode == TRAIN:
            if record.prompt_ingredients:
                parts += _spans(record.prompt_ingredients, ING, trailing=False)
            else:
                parts.append(NOINGS)
            parts.append(END)
        return RenderedPrompt(" ".join(parts), stop)

    parts.append(src_tag(record.constraint))
    parts += [sanitize(record.src_title), ENDOFTITLE]

    if kind == "no-context":
        parts += [sanitize(record.src_steps[0]), ENDOFINST,
                  tgt_tag(record.constraint)]
        if mode == TRAIN:
            parts += [sanitize(record.tgt_step), END]
        return RenderedPrompt(" ".join(parts), stop)

    trailing_ing = kind == "end-to-end"
    parts += _spans(record.src_ingredients, ING, trailing=trailing_ing)
    parts.append(ENDOFINGS)
    parts += _spans(record.src_steps, INST, trailing=False)
    parts += [ENDOFINST, tgt_tag(record.constraint)]

    if kind == "contextual":
        steps = list(record.tgt_steps)
        if mode == TRAIN:
            steps.append(record.tgt_step)
            parts += _spans(steps, INST, trailing=False)
            parts += [ENDOFINST, END]
        else:
            # prompt ends at the separator the next step follows
            parts += _spans(steps, INST, trailing=True)
            stop = INST
        return RenderedPrompt(" ".join(parts), stop)

    if kind == "prompted":
        parts += _spans(record.tgt_steps, INST, trailing=False)
        parts.append(ENDOFINST)
        parts += _spans(record.prompt_ingredients, ING, trailing=False)
        parts.append(ENDOFPROMPT)
        if mode == TRAIN:
            parts += [sanitize(record.tgt_step), END]
        return RenderedPrompt(" ".join(parts), stop)

    # end-to-end
    parts += [sanitize(record.tgt_title), ENDOFTITLE]
    parts += _spans(record.tgt_ingredients, ING, trailing=True)
    parts.append(ENDOFINGS)
    if mode == TRAIN:
        parts += _spans(record.tgt_steps, INST, trailing=False)
        parts += [ENDOFINST, END]
    return RenderedPrompt(" ".join(parts), stop)


class _Scanner:
    """Token/text item stream over a rendered prompt, tracking byte offsets."""

    def __init__(self, text: str):
        self.items: list[tuple[str, str, int]] = []  # (type, value, offset)
        pos = 0
        for m in _TOKEN_RE.finditer(text):
            between = text[pos:m.start()].strip()
            if between:
                self.items.append(("text", between, _byte_offset(text, pos)))
            self.items.append(("tok", m.group(0), _byte_offset(text, m.start())))
            pos = m.end()
        tail = text[pos:].strip()
        if tail:
            self.items.append(("text", tail, _byte_offset(text, pos)))
        self.end_offset = _byte_offset(text, len(text))
        self.i = 0

    def _peek(self):
        return self.items[self.i] if self.i < len(self.items) else None

    def expect_token(self, token: str) -> None:
        item = self._peek()
        if item is None:
            raise PromptParseError(f"missing {token}", self.end_offset)
        if item[0] != "tok" or item[1] != token:
            raise PromptParseError(
                f"expected {token}, found {item[1]!r}", item[2])
        self.i += 1

    def expect_tag(self, pattern: re.Pattern) -> str:
        item = self._peek()
        if item is None:
            raise PromptParseError("missing constraint tag", self.end_offset)
        if item[0] == "tok":
            m = pattern.fullmatch(item[1])
            if m:
                constraint = m.group(1)
                if constraint not in CONSTRAINTS:
                    raise PromptParseError(
                        f"unknown constraint tag {item[1]!r}", item[2])
                self.i += 1
                return constraint
        raise PromptParseError(
            f"expected constraint tag, found {item[1]!r}", item[2])

    def expect_text(self, what: str) -> str:
        item = self._peek()
        if item is None:
            raise PromptParseError(f"missing {what}", self.end_offset)
        if item[0] != "text":
            raise PromptParseError(
                f"expected {what}, found {item[1]!r}", item[2])
        self.i += 1
        return item[1]

    def take_list(self, sep: str, terminator: str, *,
                  trailing_sep: bool, what: str) -> list[str]:
        """Items separated (or each followed) by `sep` until `terminator`;
        consumes the terminator. Allows an empty list."""
        out: list[str] = []
        while True:
            item = self._peek()
            if item is None:
                raise PromptParseError(f"missing {terminator}", self.end_offset)
            if item[0] == "tok" and item[1] == terminator:
                self.i += 1
                return out
            if item[0] == "tok" and item[1] == sep and not out:
                raise PromptParseError(
                    f"unexpected {sep} before any {what}", item[2])
            out.append(self.expect_text(what))
            nxt = self._peek()
            if nxt is None:
                raise PromptParseError(f"missing {terminator}", self.end_offset)
            if nxt[0] == "tok" and nxt[1] == sep:
                self.i += 1
                continue
            if nxt[0] == "tok" and nxt[1] == terminator:
                if trailing_sep:
                    raise PromptParseError(
                        f"expected {sep} before {terminator}", nxt[2])
                self.i += 1
                return out
            raise PromptParseError(
                f"expected {sep} or {terminator}, found {nxt[1]!r}", nxt[2])

    def at_end(self) -> None:
        item = self._peek()
        if item is not None:
            raise PromptParseError(
                f"trailing content {item[1]!r}", item[2])


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def parse(text: str, kind: str) -> PromptRecord:
    """Inverse of serialize(..., train): parse(serialize(r)) == r for any
    record whose content spans are sanitized."""
    if kind not in KINDS:
        raise PromptFormatError(f"unknown kind {kind!r}")
    sc = _Scanner(text)
    sc.expect_token(START)

    if kind == "ing-pred":
        title = sc.expect_text("title")
        sc.expect_token(ENDOFTITLE)
        ings = sc.take_list(ING, ENDOFINGS, trailing_sep=True,
                            what="ingredient")
        steps = sc.take_list(INST, ENDOFINST, trailing_sep=False, what="step")
        item = sc._peek()
        if item is not None and item[0] == "tok" and item[1] == NOINGS:
            sc.i += 1
            prompt: list[str] = []
        else:
            prompt = sc.take_list(ING, END, trailing_sep=False,
                                  what="prompt ingredient")
            sc.at_end()
            return PromptRecord(kind, None, title, tuple(ings), tuple(steps),
                                prompt_ingredients=tuple(prompt))
        sc.expect_token(END)
        sc.at_end()
        return PromptRecord(kind, None, title, tuple(ings), tuple(steps),
                            prompt_ingredients=tuple(prompt))

    constraint = sc.expect_tag(_SRC_TAG_RE)
    src_title = sc.expect_text("source title")
    sc.expect_token(ENDOFTITLE)

    if kind == "no-context":
        src_step = sc.expect_text("source step")
        sc.expect_token(ENDOFINST)
        tgt_constraint = sc.expect_tag(_TGT_TAG_RE)
        _check_tags(constraint, tgt_constraint, sc)
        tgt_step = sc.expect_text("target step")
        sc.expect_token(END)
        sc.at_end()
        return PromptRecord(kind, constraint, src_title,
                            src_steps=(src_step,), tgt_step=tgt_step)

    trailing_ing = kind == "end-to-end"
    src_ings = sc.take_list(ING, ENDOFINGS, trailing_sep=trailing_ing,
                            what="source ingredient")
    src_steps = sc.take_list(INST, ENDOFINST, trailing_sep=False,
                             what="source step")
    tgt_constraint = sc.expect_tag(_TGT_TAG_RE)
    _check_tags(constraint, tgt_constraint, sc)

    if kind == "contextual":
        tgt = sc.take_list(INST, ENDOFINST, trailing_sep=False,
                           what="target step")
        if not tgt:
            raise PromptParseError("contextual record has no target step",
                                   sc.end_offset)
        sc.expect_token(END)
        sc.at_end()
        return PromptRecord(kind, constraint, src_title, tuple(src_ings),
                            tuple(src_steps), tgt_steps=tuple(tgt[:-1]),
                            tgt_step=tgt[-1])

    if kind == "prompted":
        tgt_steps = sc.take_list(INST, ENDOFINST, trailing_sep=False,
                                 what="target step")
        prompt = sc.take_list(ING, ENDOFPROMPT, trailing_sep=False,
                              what="prompt ingredient")
        tgt_step = sc.expect_text("target step")
        sc.expect_token(END)
        sc.at_end()
        return PromptRecord(kind, constraint, src_title, tuple(src_ings),
                            tuple(src_steps), tgt_steps=tuple(tgt_steps),
                            prompt_ingredients=tuple(prompt),
                            tgt_step=tgt_step)

    # end-to-end
    tgt_title = sc.expect_text("target title")
    sc.expect_token(ENDOFTITLE)
    tgt_ings = sc.take_list(ING, ENDOFINGS, trailing_sep=True,
                            what="target ingredient")
    tgt_steps = sc.take_list(INST, ENDOFINST, trailing_sep=False,
                             what="target step")
    sc.expect_token(END)
    sc.at_end()
    return PromptRecord(kind, constraint, src_title, tuple(src_ings),
                        tuple(src_steps), tgt_steps=tuple(tgt_steps),
                        tgt_title=tgt_title, tgt_ingredients=tuple(tgt_ings))


def _check_tags(src_constraint: str, tgt_constraint: str, sc: _Scanner):
    if src_constraint != tgt_constraint:
        raise PromptParseError(
            f"source tag constraint {src_constraint!r} does not match "
            f"target tag constraint {tgt_constraint!r}", sc.end_offset)


def render_generation_prompt(source: Recipe, constraint: str, step_n: int,
                             prior_generated: Sequence[str],
                             prompt_ings: Sequence[str] | None = None,
                             kind: str = "contextual") -> RenderedPrompt:
    """Inference prompt for rewriting source step n: target-side context is
    the previously generated steps, source-side context is the full title
    and ingredients plus source steps 1..n."""
    if not 1 <= step_n <= len(source.steps):
        raise PromptFormatError(
            f"step {step_n} out of range for {len(source.steps)} steps")
    if kind == "no-context":
        # each step is rewritten in isolation; prior outputs are unused
        record = PromptRecord(kind, constraint, source.title,
                              src_steps=(source.steps[step_n - 1],))
    elif len(prior_generated) != step_n - 1:
        raise PromptFormatError(
            f"expected {step_n - 1} previously generated steps, "
            f"got {len(prior_generated)}")
    else:
        record = PromptRecord(
            kind, constraint, source.title,
            src_ingredients=tuple(source.ingredients),
            src_steps=tuple(source.steps[:step_n]),
            tgt_steps=tuple(prior_generated),
            prompt_ingredients=(tuple(prompt_ings)
                                if prompt_ings is not None else None))
        if kind == "prompted" and record.prompt_ingredients is None:
            record = replace(record, prompt_ingredients=())
    return serialize(record, INFERENCE)
