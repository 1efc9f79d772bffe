"""Pure-Python kernels for the hot loops.

Tag sequences are int-encoded (alphabet index) ``array('i')`` values. The
compiled backend in ``_ckernels.pyx`` implements the same signatures; either
one is picked at import time by ``fstner.kernels``.
"""

from array import array

BACKEND = "python"


def apply_rule(tags, pattern, pos, repl):
    """Rewrite every leftmost non-overlapping occurrence of ``pattern``,
    changing the symbol at offset ``pos`` to ``repl``. Matching is against
    the original sequence; a match is skipped over entirely."""
    n = len(tags)
    m = len(pattern)
    out = array("i", tags)
    p0 = pattern[0]
    i = 0
    last = n - m
    while i <= last:
        if tags[i] == p0:
            j = 1
            while j < m and tags[i + j] == pattern[j]:
                j += 1
            if j == m:
                out[i + pos] = repl
                i += m
                continue
        i += 1
    return out


def score_rule(current_sents, gold_sents, pattern, pos, repl):
    """Net corrections of applying the rule over aligned sentence lists:
    +1 per match whose changed position becomes correct, -1 per match whose
    changed position was correct before."""
    m = len(pattern)
    p0 = pattern[0]
    old = pattern[pos]
    score = 0
    for tags, gold in zip(current_sents, gold_sents):
        n = len(tags)
        i = 0
        last = n - m
        while i <= last:
            if tags[i] == p0:
                j = 1
                while j < m and tags[i + j] == pattern[j]:
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


def fst_run(next_tab, out_start, out_syms, n_syms, state, inputs):
    """Flat-table subsequential run: one table lookup per input symbol.

    ``next_tab[state * n_syms + sym]`` is the next state (-1 when undefined);
    ``out_syms[out_start[cell]:out_start[cell + 1]]`` are the emitted tags.
    Returns ``(end_state, outputs)``; the caller appends the final flush.
    """
    out = []
    for sym in inputs:
        if not 0 <= sym < n_syms:
            raise ValueError(f"symbol {sym} outside alphabet")
        cell = state * n_syms + sym
        nxt = next_tab[cell]
        if nxt < 0:
            raise ValueError(f"no transition from state {state} on symbol {sym}")
        lo = out_start[cell]
        hi = out_start[cell + 1]
        while lo < hi:
            out.append(out_syms[lo])
            lo += 1
        state = nxt
    return state, out
