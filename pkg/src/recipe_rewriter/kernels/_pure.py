"""Pure-Python kernels; semantics must match _lcs_c exactly."""

from __future__ import annotations


def lcs_length_ids(a: list[int], b: list[int]) -> int:
    m = len(b)
    prev = [0] * (m + 1)
    cur = [0] * (m + 1)
    for x in a:
        for j in range(1, m + 1):
            if x == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = cur[j - 1]
                cur[j] = pj if pj >= cj else cj
        prev, cur = cur, prev
    return prev[m]


def longest_common_run_ids(a: list[int], b: list[int]
                           ) -> tuple[int, int, int]:
    m = len(b)
    prev = [0] * (m + 1)
    best_len = 0
    best_a = 0
    best_b = 0
    for i, x in enumerate(a):
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if x == b[j - 1]:
                run = prev[j - 1] + 1
                cur[j] = run
                b_start = j - run
                a_start = i - run + 1
                if (run > best_len
                        or (run == best_len and b_start < best_b)
                        or (run == best_len and b_start == best_b
                            and a_start < best_a)):
                    best_len = run
                    best_a = a_start
                    best_b = b_start
        prev = cur
    return (best_len, best_a, best_b)
