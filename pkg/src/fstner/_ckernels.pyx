# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: same contracts as ``fstner._pykernels``."""

from array import array

from cpython cimport array as carray

BACKEND = "c"

DEF MAX_PATTERN = 64


def apply_rule(tags, pattern, int pos, int repl):
    cdef carray.array src = tags if isinstance(tags, array) else array("i", tags)
    cdef carray.array out = carray.copy(src)
    cdef int[:] inview = src
    cdef int[:] outview = out
    cdef int n = inview.shape[0]
    cdef int m = len(pattern)
    cdef int pbuf[MAX_PATTERN]
    if m > MAX_PATTERN:
        raise ValueError(f"pattern longer than {MAX_PATTERN}")
    cdef int i, j
    for i in range(m):
        pbuf[i] = pattern[i]
    cdef int p0 = pbuf[0]
    cdef int last = n - m
    i = 0
    while i <= last:
        if inview[i] == p0:
            j = 1
            while j < m and inview[i + j] == pbuf[j]:
                j += 1
            if j == m:
                outview[i + pos] = repl
                i += m
                continue
        i += 1
    return out


def score_rule(list current_sents, list gold_sents, pattern, int pos, int repl):
    cdef int m = len(pattern)
    cdef int pbuf[MAX_PATTERN]
    if m > MAX_PATTERN:
        raise ValueError(f"pattern longer than {MAX_PATTERN}")
    cdef int i, j, n, g, last
    for i in range(m):
        pbuf[i] = pattern[i]
    cdef int p0 = pbuf[0]
    cdef int old = pbuf[pos]
    cdef long score = 0
    cdef int[:] tags
    cdef int[:] gold
    cdef Py_ssize_t si
    for si in range(len(current_sents)):
        tags = current_sents[si]
        gold = gold_sents[si]
        n = tags.shape[0]
        last = n - m
        i = 0
        while i <= last:
            if tags[i] == p0:
                j = 1
                while j < m and tags[i + j] == pbuf[j]:
                    j += 1
                if j == m:
                    g = gold[i + pos]
                    if g == repl:
                        score += 1
                    elif g == old:
                        score -= 1
                    i += m
                    continue
            i += 1
    return score


def fst_run(next_tab, out_start, out_syms, int n_syms, int state, inputs):
    cdef carray.array inp = inputs if isinstance(inputs, array) else array("i", inputs)
    cdef int[:] nxt = next_tab
    cdef int[:] ostart = out_start
    cdef int[:] osyms = out_syms
    cdef int[:] seq = inp
    cdef int n = seq.shape[0]
    cdef carray.array out = carray.clone(inp, n + 8, zero=False)
    cdef int[:] outview = out
    cdef Py_ssize_t filled = 0, cap = n + 8
    cdef int i, sym, cell, target, lo, hi
    for i in range(n):
        sym = seq[i]
        cell = state * n_syms + sym
        if sym < 0 or sym >= n_syms:
            raise ValueError(f"symbol {sym} outside alphabet")
        target = nxt[cell]
        if target < 0:
            raise ValueError(f"no transition from state {state} on symbol {sym}")
        lo = ostart[cell]
        hi = ostart[cell + 1]
        if filled + (hi - lo) > cap:
            cap = 2 * cap + (hi - lo)
            carray.resize(out, cap)
            outview = out
        while lo < hi:
            outview[filled] = osyms[lo]
            filled += 1
            lo += 1
        state = target
    carray.resize(out, filled)
    return state, list(out)
