"""Longest-common-subsequence kernels.

These inner loops dominate corpus alignment (every candidate step pair gets
an LCS-based score) and recipe-level ROUGE, so a Cython extension is built
when possible; a pure-Python implementation with identical semantics is the
import-time fallback. `BACKEND` records which one is active.
"""

from __future__ import annotations

from collections.abc import Sequence

try:  # pragma: no cover - exercised indirectly, depends on build
    from recipe_rewriter.kernels._lcs_c import (
        lcs_length_ids as _lcs_length_ids,
        longest_common_run_ids as _longest_common_run_ids,
    )
    BACKEND = "c"
except ImportError:  # pragma: no cover
    from recipe_rewriter.kernels._pure import (
        lcs_length_ids as _lcs_length_ids,
        longest_common_run_ids as _longest_common_run_ids,
    )
    BACKEND = "pure"


def _encode(a: Sequence[str], b: Sequence[str]) -> tuple[list[int], list[int]]:
    ids: dict[str, int] = {}
    return ([ids.setdefault(t, len(ids)) for t in a],
            [ids.setdefault(t, len(ids)) for t in b])


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences."""
    if not a or not b:
        return 0
    ia, ib = _encode(a, b)
    return _lcs_length_ids(ia, ib)


def longest_common_run(a: Sequence[str], b: Sequence[str]
                       ) -> tuple[int, int, int]:
    """Longest common contiguous run of two token sequences.

    Returns (length, a_start, b_start); zero length means no common token.
    Ties prefer the earliest b position, then the earliest a position.
    """
    if not a or not b:
        return (0, 0, 0)
    ia, ib = _encode(a, b)
    return _longest_common_run_ids(ia, ib)
