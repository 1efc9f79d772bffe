"""Shared test oracles and fixtures.

``rewrite_oracle`` is the independent reference for every transducer
equivalence check: a direct left-to-right scan that replaces leftmost
non-overlapping occurrences. It never touches the machines it validates.
"""

from fstner.fst import Transducer


def rewrite_oracle(seq, pattern, position, replacement):
    """Leftmost non-overlapping replacement by direct scanning."""
    seq = tuple(seq)
    pattern = tuple(pattern)
    m = len(pattern)
    out = []
    i = 0
    while i < len(seq):
        if seq[i:i + m] == pattern:
            out.extend(pattern[:position])
            out.append(replacement)
            out.extend(pattern[position + 1:])
            i += m
        else:
            out.append(seq[i])
            i += 1
    return tuple(out)


def kmp_oracle(pattern, state, symbol):
    """Longest pattern prefix that is a suffix of the matched prefix plus
    ``symbol``, found by brute force."""
    pattern = tuple(pattern)
    seen = pattern[:state] + (symbol,)
    best = 0
    for j in range(1, min(len(pattern), len(seen)) + 1):
        if pattern[:j] == seen[len(seen) - j:]:
            best = j
    return best


def ambiguous_extension_fixture() -> Transducer:
    """Frozen counterexample: an overlap-agnostic extension of the rule
    aa -> ba that admits two accepting outputs on "aaa" ("aba" and "baa").
    Kept only to document why the KMP-based construction is needed; never
    part of the production pipeline.
    """
    edges = {
        (0, "b", "b", 0),
        (0, "a", "a", 1),   # speculatively copy an 'a'
        (0, "a", "b", 2),   # or start replacing an occurrence here
        (1, "b", "b", 0),
        (1, "a", "b", 2),   # replacement may also start after the copied 'a'
        (2, "a", "a", 0),   # second half of the replaced occurrence
    }
    return Transducer(3, frozenset(edges), frozenset({0, 1}), ("a", "b"))
