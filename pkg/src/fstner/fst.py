"""Letter-to-letter finite-state transducers and the rule-compilation pipeline.

One contextual rewrite rule becomes a small nondeterministic transducer (its
*local extension*) that replaces every leftmost non-overlapping occurrence of
a pattern and copies everything else. Rule transducers are composed in
learning order and the result is determinized into a subsequential machine
that tags a tag sequence in one pass.

All construction functions are pure; built machines are immutable and safe to
share across threads.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

WILDCARD = "?"

Edge = tuple[int, str, str, int]


class RuleSpecError(ValueError):
    """Malformed rewrite-rule specification."""


class AlphabetMismatchError(ValueError):
    """Two machines in a binary operation carry different alphabets."""


class DeterminizationConflictError(RuntimeError):
    """Two final constituents of one subset state disagree on the pending
    output: the source transducer is not functional on its domain."""


class StateCapExceededError(RuntimeError):
    """Determinization grew past the configured state cap, which signals a
    suspected non-terminating construction."""


class RunDomainError(KeyError):
    """The deterministic machine has no transition for an input symbol, or
    the input ends in a state with no final output."""


class PathGuardError(ValueError):
    """Input too long for exhaustive path enumeration."""


@dataclass(frozen=True)
class RewriteRuleSpec:
    """A pattern, the index of the symbol to change, and its replacement."""

    pattern: tuple[str, ...]
    position: int
    replacement: str

    def __post_init__(self):
        if len(self.pattern) < 1:
            raise RuleSpecError("pattern must be non-empty")
        if not 0 <= self.position < len(self.pattern):
            raise RuleSpecError(
                f"position {self.position} outside pattern of length {len(self.pattern)}")
        if self.replacement == self.pattern[self.position]:
            raise RuleSpecError("replacement must differ from the replaced symbol")


@dataclass(frozen=True)
class Transducer:
    """Nondeterministic letter-to-letter transducer with optional wildcard
    edges and an optional designated sink state.

    ``edges`` holds quadruples ``(p, a, b, q)``: from state ``p``, read ``a``,
    write ``b``, go to ``q``. A wildcard input stands for every alphabet
    symbol that does not label another out-edge of ``p`` and always copies.
    """

    state_count: int
    edges: frozenset[Edge]
    finals: frozenset[int]
    alphabet: tuple[str, ...]
    sink: Optional[int] = None
    initial: int = 0

    def __post_init__(self):
        if WILDCARD in self.alphabet:
            raise ValueError("alphabet must not contain the wildcard symbol")
        wildcard_from: set[int] = set()
        for p, a, b, q in self.edges:
            if not (0 <= p < self.state_count and 0 <= q < self.state_count):
                raise ValueError(f"edge ({p},{a},{b},{q}) endpoint out of range")
            if a == WILDCARD:
                if p in wildcard_from:
                    raise ValueError(f"state {p} has two wildcard out-edges")
                wildcard_from.add(p)
            if self.sink is not None and p == self.sink:
                raise ValueError(f"sink state {self.sink} has an out-going edge")

    @cached_property
    def arcs(self) -> dict[int, dict[str, list[tuple[str, int]]]]:
        """state -> input symbol -> [(output, target)], deterministically ordered."""
        index: dict[int, dict[str, list[tuple[str, int]]]] = {}
        for p, a, b, q in sorted(self.edges):
            index.setdefault(p, {}).setdefault(a, []).append((b, q))
        return index

    def out_edges(self, p: int) -> Iterator[Edge]:
        for a, moves in self.arcs.get(p, {}).items():
            for b, q in moves:
                yield (p, a, b, q)

    def input_symbols(self, p: int) -> set[str]:
        return {a for a in self.arcs.get(p, {}) if a != WILDCARD}

    def has_wildcards(self) -> bool:
        return any(a == WILDCARD for _, a, _, _ in self.edges)


@dataclass(frozen=True)
class SubsequentialTransducer:
    """Deterministic transducer with delayed string outputs.

    ``transitions`` maps ``(state, symbol)`` to ``(next_state, emitted tags)``;
    ``final_output`` maps a state to the tags flushed when input ends there.
    """

    state_count: int
    transitions: dict[tuple[int, str], tuple[int, tuple[str, ...]]]
    final_output: dict[int, tuple[str, ...]]
    alphabet: tuple[str, ...]
    initial: int = 0


def kmp_next(pattern: Sequence[str], state: int, symbol: str) -> int:
    """Transition of the pattern-matching automaton: the length of the longest
    pattern prefix that is a suffix of the matched prefix extended by
    ``symbol``. Total over any symbol.
    """
    m = len(pattern)
    if not 0 <= state <= m - 1:
        raise ValueError(f"state {state} outside 0..{m - 1}")
    pat = tuple(pattern)
    seen = pat[:state] + (symbol,)
    for j in range(min(m, state + 1) - 1, -1, -1):
        if pat[:j + 1] == seen[len(seen) - (j + 1):]:
            return j + 1
    return 0


def _is_suffix(a: tuple, b: tuple) -> bool:
    return len(a) <= len(b) and b[len(b) - len(a):] == a


def _is_prefix(a: tuple, b: tuple) -> bool:
    return len(a) <= len(b) and b[:len(a)] == a


def local_extension(spec: RewriteRuleSpec,
                    alphabet: Sequence[str]) -> Transducer:
    """Transducer that rewrites every leftmost non-overlapping occurrence of
    ``spec.pattern``, changing the symbol at ``spec.position`` to
    ``spec.replacement`` and copying all other input.

    States 0..m-1 track the matched pattern prefix and are final; state m is
    the sink; the remaining states verify the pattern tail after a committed
    replacement. Restricted to accepting paths the machine is unambiguous.
    """
    pat = spec.pattern
    m = len(pat)
    k = spec.position
    c = spec.replacement
    sigma = tuple(alphabet)
    missing = [s for s in pat + (c,) if s not in sigma]
    if missing:
        raise RuleSpecError(f"symbols {missing} not in alphabet")

    pattern_symbols = [s for s in sigma if s in set(pat)]
    edges: set[Edge] = set()
    finals = frozenset(range(m))

    # Prefix-matching part: copy edges along the KMP automaton. Reaching
    # state m on this track means a full occurrence was left unreplaced, so
    # m is a sink and the path rejects.
    for q in range(m):
        for a in pattern_symbols:
            edges.add((q, a, a, kmp_next(pat, q, a)))
        edges.add((q, WILDCARD, WILDCARD, 0))

    if k == m - 1:
        trans_node = 0
    else:
        trans_node = m + 1
        for i in range(k + 1, m - 1):
            node = m + i - k
            edges.add((node, pat[i], pat[i], node + 1))
            edges.add((node, WILDCARD, WILDCARD, m))
        last = 2 * m - k - 1
        edges.add((last, pat[m - 1], pat[m - 1], 0))
        edges.add((last, WILDCARD, WILDCARD, m))

    # The replacement transition itself.
    edges.add((k, pat[k], c, trans_node))

    # Replacement may also start from deeper prefix states i > k when the
    # matched prefix re-contains the first k pattern symbols, unless doing so
    # would shadow an occurrence that started earlier (leftmost priority).
    for i in range(k + 1, m):
        s = pat[k:i] + pat[k:m]
        if _is_suffix(pat[:k], pat[:i]) and not _is_prefix(s[:m - k], s[i - k:]):
            edges.add((i, pat[k], c, trans_node))

    state_count = m + 1 if k == m - 1 else 2 * m - k
    return Transducer(state_count, frozenset(edges), finals, sigma, sink=m)


def identity_transducer(alphabet: Sequence[str]) -> Transducer:
    """One final state copying every alphabet symbol to itself."""
    sigma = tuple(alphabet)
    edges = frozenset((0, a, a, 0) for a in sigma)
    return Transducer(1, edges, frozenset({0}), sigma)


def expand_wildcards(t: Transducer) -> Transducer:
    """Replace each wildcard edge by one copy edge per alphabet symbol not
    already read on another out-edge of the same state. The relation is
    unchanged.
    """
    edges: set[Edge] = set()
    for p, a, b, q in t.edges:
        if a != WILDCARD:
            edges.add((p, a, b, q))
            continue
        if b != WILDCARD:
            raise ValueError(
                f"wildcard edge ({p},{a},{b},{q}) must copy its input")
        taken = t.input_symbols(p)
        for sym in t.alphabet:
            if sym not in taken:
                edges.add((p, sym, sym, q))
    return Transducer(t.state_count, frozenset(edges), t.finals, t.alphabet,
                      sink=t.sink, initial=t.initial)


def trim(t: Transducer) -> Transducer:
    """Drop states that are unreachable from the initial state or cannot reach
    a final state. A reachable designated sink is kept: it carries the
    wildcard convention even though no path through it accepts. Surviving
    states keep their relative order, so diagram numberings stay stable.
    """
    reachable = {t.initial}
    stack = [t.initial]
    while stack:
        p = stack.pop()
        for _, _, _, q in t.out_edges(p):
            if q not in reachable:
                reachable.add(q)
                stack.append(q)

    back: dict[int, set[int]] = {}
    for p, _, _, q in t.edges:
        back.setdefault(q, set()).add(p)
    coreach = set(t.finals)
    stack = list(t.finals)
    while stack:
        q = stack.pop()
        for p in back.get(q, ()):
            if p not in coreach:
                coreach.add(p)
                stack.append(p)

    keep = reachable & coreach
    keep.add(t.initial)
    if t.sink is not None and t.sink in reachable:
        keep.add(t.sink)

    renum = {old: new for new, old in enumerate(sorted(keep))}
    edges = frozenset((renum[p], a, b, renum[q]) for p, a, b, q in t.edges
                      if p in keep and q in keep)
    finals = frozenset(renum[q] for q in t.finals if q in keep)
    sink = renum.get(t.sink) if t.sink is not None else None
    return Transducer(len(keep), edges, finals, t.alphabet, sink=sink,
                      initial=renum[t.initial])


def compose(first: Transducer, second: Transducer) -> Transducer:
    """Product machine feeding the output of ``first`` into ``second``.

    Both operands must be wildcard-free and share one alphabet. The result is
    trimmed to states both reachable and co-reachable; product states paired
    with a sink die there, so the result carries no sink designation.
    """
    if first.alphabet != second.alphabet:
        raise AlphabetMismatchError(
            f"alphabets differ: {first.alphabet} vs {second.alphabet}")
    if first.has_wildcards() or second.has_wildcards():
        raise ValueError("compose requires wildcard-free operands")

    start = (first.initial, second.initial)
    number = {start: 0}
    queue = [start]
    edges: set[Edge] = set()
    finals: set[int] = set()
    while queue:
        pair = queue.pop()
        p1, p2 = pair
        pid = number[pair]
        if p1 in first.finals and p2 in second.finals:
            finals.add(pid)
        arcs2 = second.arcs.get(p2, {})
        for a, moves1 in first.arcs.get(p1, {}).items():
            for b, q1 in moves1:
                for c, q2 in arcs2.get(b, ()):
                    nxt = (q1, q2)
                    nid = number.get(nxt)
                    if nid is None:
                        nid = number[nxt] = len(number)
                        queue.append(nxt)
                    edges.add((pid, a, c, nid))
    raw = Transducer(len(number), frozenset(edges), frozenset(finals),
                     first.alphabet)
    return trim(raw)


def determinize(t: Transducer,
                state_cap: int = 10 ** 6,
                stats: Optional[dict] = None) -> SubsequentialTransducer:
    """Subset construction over (state, pending output) pairs.

    Each transition emits the longest common prefix of the candidate outputs
    and carries the rest forward; a state's final output is the pending
    string of its final constituent. Two final constituents with different
    pending strings mean the source is not functional and the construction
    aborts. ``stats``, when given, receives ``det_states`` and
    ``max_pending``.
    """
    if t.has_wildcards():
        raise ValueError("determinize requires a wildcard-free transducer")

    start = ((t.initial, ()),)
    ids: dict[tuple, int] = {start: 0}
    queue = [start]
    transitions: dict[tuple[int, str], tuple[int, tuple[str, ...]]] = {}
    final_output: dict[int, tuple[str, ...]] = {}
    max_pending = 0

    while queue:
        subset = queue.pop()
        sid = ids[subset]

        pending_finals = {w for p, w in subset if p in t.finals}
        if len(pending_finals) > 1:
            raise DeterminizationConflictError(
                f"state {sid} has conflicting final outputs {sorted(pending_finals)}")
        if pending_finals:
            final_output[sid] = next(iter(pending_finals))

        for a in t.alphabet:
            moves: set[tuple[int, tuple[str, ...]]] = set()
            for p, w in subset:
                for b, q in t.arcs.get(p, {}).get(a, ()):
                    moves.add((q, w + (b,)))
            if not moves:
                continue
            outs = [w for _, w in moves]
            lcp = outs[0]
            for w in outs[1:]:
                i = 0
                limit = min(len(lcp), len(w))
                while i < limit and lcp[i] == w[i]:
                    i += 1
                lcp = lcp[:i]
            nxt = tuple(sorted((q, w[len(lcp):]) for q, w in moves))
            for _, w in nxt:
                if len(w) > max_pending:
                    max_pending = len(w)
            nid = ids.get(nxt)
            if nid is None:
                if len(ids) >= state_cap:
                    raise StateCapExceededError(
                        f"determinization exceeded {state_cap} states")
                nid = ids[nxt] = len(ids)
                queue.append(nxt)
            transitions[(sid, a)] = (nid, lcp)

    if stats is not None:
        stats["det_states"] = len(ids)
        stats["max_pending"] = max_pending
    return SubsequentialTransducer(len(ids), transitions, final_output,
                                   t.alphabet)


def run(d: SubsequentialTransducer, inputs: Iterable[str]) -> list[str]:
    """Follow the unique path: one transition lookup per input symbol, then
    flush the final output of the end state."""
    out: list[str] = []
    state = d.initial
    for sym in inputs:
        try:
            state, emitted = d.transitions[(state, sym)]
        except KeyError:
            raise RunDomainError(
                f"no transition from state {state} on {sym!r}") from None
        out.extend(emitted)
    flush = d.final_output.get(state)
    if flush is None:
        raise RunDomainError(f"input ends in non-final state {state}")
    out.extend(flush)
    return out


def accepting_outputs(t: Transducer, inputs: Sequence[str],
                      guard: int = 20) -> list[tuple[str, ...]]:
    """Outputs of every accepting path consuming the whole input, one list
    entry per path. Wildcard edges are interpreted by their convention.
    Exhaustive, so inputs are capped at ``guard`` symbols.
    """
    if len(inputs) > guard:
        raise PathGuardError(f"input longer than guard ({guard})")
    results: list[tuple[str, ...]] = []
    stack: list[tuple[int, int, tuple[str, ...]]] = [(t.initial, 0, ())]
    n = len(inputs)
    while stack:
        state, pos, out = stack.pop()
        if pos == n:
            if state in t.finals:
                results.append(out)
            continue
        sym = inputs[pos]
        arcs = t.arcs.get(state, {})
        for b, q in arcs.get(sym, ()):
            stack.append((q, pos + 1, out + (b,)))
        if sym not in arcs:
            for b, q in arcs.get(WILDCARD, ()):
                stack.append((q, pos + 1, out + (sym,)))
    return results


def enumerate_paths(t: Transducer, inputs: Sequence[str],
                    guard: int = 20) -> set[tuple[str, ...]]:
    """Set of distinct accepting-path outputs on ``inputs``."""
    return set(accepting_outputs(t, inputs, guard))


class PackedFst:
    """Flat-table form of a SubsequentialTransducer for the kernel runner.

    Symbols are encoded as alphabet indices; transitions live in dense
    ``state_count * len(alphabet)`` arrays so one input symbol costs one
    table lookup regardless of backend.
    """

    def __init__(self, d: SubsequentialTransducer):
        from fstner import kernels

        self._kernels = kernels
        self.alphabet = d.alphabet
        self.symbol_index = {sym: i for i, sym in enumerate(d.alphabet)}
        self.initial = d.initial
        self.final_output = {q: tuple(self.symbol_index[s] for s in out)
                             for q, out in d.final_output.items()}
        n_syms = len(d.alphabet)
        self.n_syms = n_syms
        cells = d.state_count * n_syms
        next_tab = array("i", [-1]) * cells
        out_start = array("i", [0]) * (cells + 1)
        out_syms = array("i")
        total = 0
        for state in range(d.state_count):
            for si, sym in enumerate(d.alphabet):
                cell = state * n_syms + si
                out_start[cell] = total
                move = d.transitions.get((state, sym))
                if move is not None:
                    nxt, emitted = move
                    next_tab[cell] = nxt
                    for s in emitted:
                        out_syms.append(self.symbol_index[s])
                    total += len(emitted)
        out_start[cells] = total
        self.next_tab = next_tab
        self.out_start = out_start
        self.out_syms = out_syms

    def run_encoded(self, inputs) -> list[int]:
        """inputs: iterable of symbol indices; returns emitted indices."""
        try:
            end, out = self._kernels.fst_run(
                self.next_tab, self.out_start, self.out_syms,
                self.n_syms, self.initial, inputs)
        except ValueError as exc:
            raise RunDomainError(str(exc)) from None
        flush = self.final_output.get(end)
        if flush is None:
            raise RunDomainError(f"input ends in non-final state {end}")
        out.extend(flush)
        return out

    def run(self, inputs: Sequence[str]) -> list[str]:
        try:
            encoded = array("i", (self.symbol_index[s] for s in inputs))
        except KeyError as exc:
            raise RunDomainError(f"symbol {exc.args[0]!r} not in alphabet") \
                from None
        return [self.alphabet[i] for i in self.run_encoded(encoded)]


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(t: Transducer | SubsequentialTransducer) -> str:
    """Graphviz DOT text; edges labeled ``a/b``, finals double-circled,
    deterministic final outputs shown on their states."""
    lines = ["digraph fst {", "  rankdir=LR;",
             '  __start [shape=point, label=""];',
             f"  __start -> {t.initial};"]
    if isinstance(t, SubsequentialTransducer):
        for q in range(t.state_count):
            flush = t.final_output.get(q)
            if flush is None:
                lines.append(f'  {q} [shape=circle, label="{q}"];')
            else:
                label = f"{q} / {' '.join(flush)}" if flush else str(q)
                lines.append(
                    f'  {q} [shape=doublecircle, label="{_dot_escape(label)}"];')
        for (p, a), (q, out) in sorted(t.transitions.items()):
            label = f"{a}/{' '.join(out) if out else 'ε'}"
            lines.append(f'  {p} -> {q} [label="{_dot_escape(label)}"];')
    else:
        for q in range(t.state_count):
            shape = "doublecircle" if q in t.finals else "circle"
            lines.append(f'  {q} [shape={shape}, label="{q}"];')
        for p, a, b, q in sorted(t.edges):
            label = _dot_escape(f"{a}/{b}")
            lines.append(f'  {p} -> {q} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
