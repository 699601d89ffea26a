# cython: boundscheck=False, wraparound=False
"""C kernels; semantics must match _pure exactly."""

from libc.stdlib cimport malloc, free


cdef int* _to_carray(list seq) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef int* out = <int*> malloc(n * sizeof(int) if n else sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = seq[i]
    return out


def lcs_length_ids(list a, list b):
    cdef Py_ssize_t n = len(a), m = len(b)
    if n == 0 or m == 0:
        return 0
    cdef int* ca = _to_carray(a)
    cdef int* cb = _to_carray(b)
    cdef int* prev = <int*> malloc((m + 1) * sizeof(int))
    cdef int* cur = <int*> malloc((m + 1) * sizeof(int))
    cdef int* tmp
    cdef Py_ssize_t i, j
    cdef int pj, cj, result
    if prev == NULL or cur == NULL:
        free(ca); free(cb); free(prev); free(cur)
        raise MemoryError()
    for j in range(m + 1):
        prev[j] = 0
        cur[j] = 0
    for i in range(n):
        for j in range(1, m + 1):
            if ca[i] == cb[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = cur[j - 1]
                cur[j] = pj if pj >= cj else cj
        tmp = prev; prev = cur; cur = tmp
    result = prev[m]
    free(ca); free(cb); free(prev); free(cur)
    return result


def longest_common_run_ids(list a, list b):
    cdef Py_ssize_t n = len(a), m = len(b)
    if n == 0 or m == 0:
        return (0, 0, 0)
    cdef int* ca = _to_carray(a)
    cdef int* cb = _to_carray(b)
    cdef int* prev = <int*> malloc((m + 1) * sizeof(int))
    cdef int* cur = <int*> malloc((m + 1) * sizeof(int))
    cdef int* tmp
    cdef Py_ssize_t i, j
    cdef int run, b_start, a_start
    cdef int best_len = 0, best_a = 0, best_b = 0
    if prev == NULL or cur == NULL:
        free(ca); free(cb); free(prev); free(cur)
        raise MemoryError()
    for j in range(m + 1):
        prev[j] = 0
    for i in range(n):
        for j in range(m + 1):
            cur[j] = 0
        for j in range(1, m + 1):
            if ca[i] == cb[j - 1]:
                run = prev[j - 1] + 1
                cur[j] = run
                b_start = <int>j - run
                a_start = <int>i - run + 1
                if (run > best_len
                        or (run == best_len and b_start < best_b)
                        or (run == best_len and b_start == best_b
                            and a_start < best_a)):
                    best_len = run
                    best_a = a_start
                    best_b = b_start
        tmp = prev; prev = cur; cur = tmp
    free(ca); free(cb); free(prev); free(cur)
    return (best_len, best_a, best_b)
