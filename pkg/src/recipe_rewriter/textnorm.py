"""Shared text normalization and tokenization.

Every module that matches, aligns, or scores text goes through this one
tokenizer so that lexicon matching, ingredient extraction, and the metrics
all agree on token boundaries: lowercase NFC, split on whitespace and
punctuation, word tokens only.
"""

from __future__ import annotations

import re
import unicodedata

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)
_WS_RE = re.compile(r"\s+")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def clean_span(text: str) -> str:
    """NFC-normalize and collapse whitespace runs to single spaces."""
    return _WS_RE.sub(" ", nfc(text)).strip()


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens; punctuation and whitespace are dropped."""
    return [m.group(0).lower() for m in _WORD_RE.finditer(nfc(text))]


def tokenize_spans(text: str) -> list[tuple[str, int, int]]:
    """Like tokenize() but with (token, start, end) character offsets.

    Offsets index into the NFC-normalized text; callers that slice must
    normalize first (all ingest paths already do).
    """
    return [(m.group(0).lower(), m.start(), m.end())
            for m in _WORD_RE.finditer(nfc(text))]


def singular_variants(token: str) -> tuple[str, ...]:
    """The token plus crude de-pluralized forms (trailing "s"/"es").

    Catches "eggs" vs "egg" and "tomatoes" vs "tomato" without a lemmatizer.
    """
    variants = [token]
    if len(token) > 3 and token.endswith("es"):
        variants.append(token[:-2])
    if len(token) > 2 and token.endswith("s"):
        variants.append(token[:-1])
    return tuple(variants)


def is_quantity(token: str) -> bool:
    """True for purely numeric tokens (amounts such as "2" or "1/2" halves)."""
    return token.isdigit()
