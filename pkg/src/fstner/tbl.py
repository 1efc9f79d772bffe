"""Transformation-based learning of contextual tag-rewrite rules.

The learner greedily picks, one stage at a time, the rule with the best net
error correction, applies it, and repeats. Phase 1 is unrestricted; phase 2
only admits rules replacing a trigger tag by an entity tag. The ordered list
compiles through the fst module into one deterministic transducer.
"""

from __future__ import annotations

import logging
from array import array
from dataclasses import dataclass
from typing import Optional, Sequence

from fstner import kernels
from fstner.corpus import TagAlphabet
from fstner.fst import (RewriteRuleSpec, SubsequentialTransducer, compose,
                        determinize, expand_wildcards, identity_transducer,
                        local_extension)

logger = logging.getLogger(__name__)

TagSeq = Sequence[str]


@dataclass(frozen=True)
class ContextualRule:
    """Change ``from_tag`` to ``to_tag`` when surrounded by the given tag
    context. Contexts may be empty on one side but not both."""

    left: tuple[str, ...]
    from_tag: str
    to_tag: str
    right: tuple[str, ...]

    def __post_init__(self):
        if self.from_tag == self.to_tag:
            raise ValueError("rule must change the tag")
        if len(self.left) + len(self.right) < 1:
            raise ValueError("rule needs at least one context tag")

    @property
    def pattern(self) -> tuple[str, ...]:
        return self.left + (self.from_tag,) + self.right

    @property
    def position(self) -> int:
        return len(self.left)

    def to_rewrite_spec(self) -> RewriteRuleSpec:
        return RewriteRuleSpec(self.pattern, self.position, self.to_tag)

    def __str__(self):
        return (f"{' '.join(self.left)} | {self.from_tag} -> {self.to_tag}"
                f" | {' '.join(self.right)}")


@dataclass(frozen=True)
class LearnedRule:
    rule: ContextualRule
    score: int
    stage: int


def format_rule(learned: LearnedRule) -> str:
    return f"{learned.rule} # score={learned.score} stage={learned.stage}"


def parse_rule_line(line: str) -> LearnedRule:
    body, _, comment = line.partition("#")
    score = stage = None
    for item in comment.split():
        key, _, value = item.partition("=")
        if key == "score":
            score = int(value)
        elif key == "stage":
            stage = int(value)
    if score is None or stage is None:
        raise ValueError(f"rule line missing score/stage: {line!r}")
    parts = body.split("|")
    if len(parts) != 3:
        raise ValueError(f"expected 'left | from -> to | right': {line!r}")
    middle = parts[1].split("->")
    if len(middle) != 2:
        raise ValueError(f"expected 'from -> to': {line!r}")
    rule = ContextualRule(tuple(parts[0].split()), middle[0].strip(),
                          middle[1].strip(), tuple(parts[2].split()))
    return LearnedRule(rule, score, stage)


def apply_rule(tags: TagSeq, rule: ContextualRule) -> list[str]:
    """Reference leftmost non-overlapping application over string tags.

    Matches are tested against the original sequence and skipped over whole,
    which is exactly what the compiled transducer does.
    """
    pattern = rule.pattern
    m = len(pattern)
    out = list(tags)
    i = 0
    last = len(tags) - m
    while i <= last:
        if tuple(tags[i:i + m]) == pattern:
            out[i + rule.position] = rule.to_tag
            i += m
        else:
            i += 1
    return out


def count_errors(current: Sequence[TagSeq], gold: Sequence[TagSeq]) -> int:
    return sum(1 for cs, gs in zip(current, gold)
               for c, g in zip(cs, gs) if c != g)


def score_rule(current: Sequence[TagSeq], gold: Sequence[TagSeq],
               rule: ContextualRule) -> int:
    """Corrections minus damages when applying ``rule`` to every sentence."""
    if len(current) != len(gold):
        raise ValueError("current and gold differ in sentence count")
    score = 0
    for cs, gs in zip(current, gold):
        if len(cs) != len(gs):
            raise ValueError("current and gold differ in sentence length")
        for c, n, g in zip(cs, apply_rule(cs, rule), gs):
            if c == n:
                continue
            if n == g:
                score += 1
            elif c == g:
                score -= 1
    return score


def _candidate_sites(current: Sequence[TagSeq], gold: Sequence[TagSeq],
                     phase: int, alphabet: TagAlphabet,
                     max_context: int) -> dict[ContextualRule, int]:
    """Candidates with the number of error sites that instantiated each one.

    A rule can only correct positions that instantiated it, so the site
    count is an upper bound on its score; the learner uses that to skip
    hopeless candidates without scoring them.
    """
    if phase not in (1, 2):
        raise ValueError(f"phase must be 1 or 2, got {phase}")
    sites: dict[ContextualRule, int] = {}
    for cs, gs in zip(current, gold):
        n = len(cs)
        for pos in range(n):
            wrong, want = cs[pos], gs[pos]
            if wrong == want:
                continue
            if phase == 2 and not (alphabet.is_trigger_tag(wrong)
                                   and alphabet.is_entity_tag(want)):
                continue
            for i in range(0, min(max_context, pos) + 1):
                for j in range(0, min(max_context, n - 1 - pos) + 1):
                    if i + j == 0:
                        continue
                    rule = ContextualRule(tuple(cs[pos - i:pos]), wrong,
                                          want, tuple(cs[pos + 1:pos + 1 + j]))
                    sites[rule] = sites.get(rule, 0) + 1
    return sites


def enumerate_candidates(current: Sequence[TagSeq], gold: Sequence[TagSeq],
                         phase: int, alphabet: TagAlphabet,
                         max_context: int = 2) -> set[ContextualRule]:
    """Instantiate every context shape around every error position.

    Any rule with a positive score must correct at least one error, so it
    appears among these instances; sweeping all tag combinations is never
    needed.
    """
    return set(_candidate_sites(current, gold, phase, alphabet, max_context))


def _rule_key(rule: ContextualRule, index: dict[str, int]):
    # shorter patterns first, then the int encoding, for deterministic ties
    pattern = rule.pattern
    return (len(pattern), tuple(index[t] for t in pattern), rule.position,
            index[rule.to_tag])


def learn_rules(current: Sequence[TagSeq], gold: Sequence[TagSeq],
                alphabet: TagAlphabet, phase1_max: int = 100,
                phase2_max: int = 15,
                max_context: int = 2) -> list[LearnedRule]:
    """Greedy selection of an ordered rule list, phase 1 then phase 2.

    A phase stops at its cap or when no candidate scores above zero; every
    recorded score is therefore strictly positive.
    """
    if len(current) != len(gold):
        raise ValueError("current and gold differ in sentence count")
    index = alphabet.index
    symbols = alphabet.symbols
    cur = [array("i", (index[t] for t in s)) for s in current]
    gld = []
    for cs, gs in zip(current, gold):
        if len(cs) != len(gs):
            raise ValueError("current and gold differ in sentence length")
        gld.append(array("i", (index[t] for t in gs)))

    learned: list[LearnedRule] = []
    for stage, cap in ((1, phase1_max), (2, phase2_max)):
        for _ in range(cap):
            decoded = [[symbols[t] for t in s] for s in cur]
            candidates = _candidate_sites(decoded, gold, stage, alphabet,
                                          max_context)
            if not candidates:
                break
            # index sentences by the tag a rule rewrites, to skip the rest
            by_tag: dict[int, list[int]] = {}
            for si, s in enumerate(cur):
                for t in set(s):
                    by_tag.setdefault(t, []).append(si)
            # score in descending site count: once the bound drops below the
            # best exact score, nothing left can win. Among scored ties the
            # smallest encoding wins, same as scoring everything.
            best_rule = None
            best_score = 0
            best_key = None
            ordered = sorted(candidates,
                             key=lambda r: (-candidates[r], _rule_key(r, index)))
            for rule in ordered:
                if candidates[rule] < best_score:
                    break
                pattern = tuple(index[t] for t in rule.pattern)
                repl = index[rule.to_tag]
                rows = by_tag.get(pattern[rule.position], ())
                score = kernels.score_rule([cur[si] for si in rows],
                                           [gld[si] for si in rows],
                                           pattern, rule.position, repl)
                if score <= 0:
                    continue
                key = (-score, _rule_key(rule, index))
                if best_key is None or key < best_key:
                    best_rule, best_score, best_key = rule, score, key
            if best_rule is None:
                break
            pattern = tuple(index[t] for t in best_rule.pattern)
            repl = index[best_rule.to_tag]
            for si in by_tag.get(pattern[best_rule.position], ()):
                cur[si] = kernels.apply_rule(cur[si], pattern,
                                             best_rule.position, repl)
            learned.append(LearnedRule(best_rule, best_score, stage))
            logger.info("rule %d (stage %d): %s  score=%d",
                        len(learned), stage, best_rule, best_score)
    return learned


def compile_rules(rules: Sequence[LearnedRule],
                  alphabet: TagAlphabet | Sequence[str],
                  state_cap: int = 10 ** 6,
                  stats: Optional[dict] = None) -> SubsequentialTransducer:
    """Fold the rule transducers in learning order and determinize.

    The result runs any tag sequence exactly like applying every rule with
    ``apply_rule`` in order.
    """
    symbols = (alphabet.symbols if isinstance(alphabet, TagAlphabet)
               else tuple(alphabet))
    acc = identity_transducer(symbols)
    for learned in rules:
        spec = learned.rule.to_rewrite_spec()
        step = expand_wildcards(local_extension(spec, symbols))
        acc = compose(acc, step)
    return determinize(acc, state_cap=state_cap, stats=stats)
