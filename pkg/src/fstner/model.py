"""The trained tagger bundle and its line-oriented on-disk format.

A model file is UTF-8, one version line followed by fixed-order sections:
[ALPHABET], [TRIGGERS], [LEXICON], [SUFFIX], [SHAPE], [RULES], [FST]. Keys
are sorted wherever the in-memory form is unordered, so loading a file and
saving it again is byte-identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from fstner import tbl
from fstner.corpus import (Corpus, TagAlphabet, relabel_for_training,
                           split_corpus)
from fstner.fst import PackedFst, SubsequentialTransducer
from fstner.lexical import LexicalModel, Trie, tag_sentence, train_lexical
from fstner.tbl import LearnedRule, compile_rules, learn_rules

logger = logging.getLogger(__name__)

FORMAT_VERSION = "fstner-model v1"
SECTIONS = ("ALPHABET", "TRIGGERS", "LEXICON", "SUFFIX", "SHAPE", "RULES",
            "FST")
EMPTY = "-"


class ModelFormatError(ValueError):
    """Raised when a model file does not follow the section format."""


@dataclass
class NerModel:
    alphabet: TagAlphabet
    lexical: LexicalModel
    rules: list[LearnedRule]
    fst: SubsequentialTransducer

    @cached_property
    def packed(self) -> PackedFst:
        return PackedFst(self.fst)

    def tag_sentence(self, tokens: Sequence[str],
                     apply_rules: bool = True) -> list[str]:
        """Lexical initialization, one transducer pass, then residual special
        tags mapped back to O."""
        tags = tag_sentence(self.lexical, tokens)
        if apply_rules:
            tags = self.packed.run(tags)
        return [self.alphabet.output_tag(t) for t in tags]

    def tag_corpus(self, sentences: Sequence[Sequence[str]],
                   apply_rules: bool = True) -> Corpus:
        return [list(zip(toks, self.tag_sentence(toks, apply_rules)))
                for toks in sentences]


def train_model(corpus: Corpus, alphabet: Optional[TagAlphabet] = None, *,
                lexical_split: float = 0.85, phase1_max: int = 100,
                phase2_max: int = 15, max_context: int = 2,
                state_cap: int = 10 ** 6) -> NerModel:
    """Full training pipeline: split, train the lexical tagger on the first
    part, initialize the second part with it, learn correction rules against
    the relabeled gold, and compile them to one deterministic transducer."""
    if alphabet is None:
        alphabet = TagAlphabet()
    lexical_part, rule_part = split_corpus(corpus, lexical_split)
    logger.info("training lexical tagger on %d sentences", len(lexical_part))
    lexical = train_lexical(lexical_part, alphabet)

    current = [tag_sentence(lexical, [surf for surf, _ in s])
               for s in rule_part]
    gold = [[tag for _, tag in s]
            for s in relabel_for_training(rule_part, alphabet)]
    logger.info("learning rules on %d sentences", len(rule_part))
    rules = learn_rules(current, gold, alphabet, phase1_max, phase2_max,
                        max_context)
    logger.info("compiling %d rules", len(rules))
    stats: dict = {}
    fst = compile_rules(rules, alphabet, state_cap=state_cap, stats=stats)
    logger.info("deterministic transducer: %d states", stats["det_states"])
    return NerModel(alphabet, lexical, rules, fst)


def _trie_lines(trie: Trie) -> list[str]:
    return [f"{key} {tag}" for key, tag in sorted(trie.items())]


def _fst_lines(fst: SubsequentialTransducer,
               alphabet: TagAlphabet) -> list[str]:
    lines = [f"state_count {fst.state_count}", f"initial {fst.initial}"]
    for q in sorted(fst.final_output):
        out = fst.final_output[q]
        lines.append(f"final {q} {' '.join(out) if out else EMPTY}")
    order = {sym: i for i, sym in enumerate(alphabet.symbols)}
    for (p, a), (q, out) in sorted(fst.transitions.items(),
                                   key=lambda kv: (kv[0][0], order[kv[0][1]])):
        lines.append(f"edge {p} {a} {','.join(out) if out else EMPTY} {q}")
    return lines


def save_model(model: NerModel, path: str) -> None:
    lines = [FORMAT_VERSION]
    lines.append("[ALPHABET]")
    lines.extend(model.alphabet.symbols)
    lines.append("[TRIGGERS]")
    lines.extend(model.alphabet.triggers)
    lines.append("[LEXICON]")
    lines.extend(_trie_lines(model.lexical.word_trie))
    lines.append("[SUFFIX]")
    lines.extend(_trie_lines(model.lexical.suffix_trie))
    lines.append("[SHAPE]")
    lines.extend(_trie_lines(model.lexical.shape_trie))
    lines.append("[RULES]")
    lines.extend(tbl.format_rule(r) for r in model.rules)
    lines.append("[FST]")
    lines.extend(_fst_lines(model.fst, model.alphabet))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _split_sections(text: str) -> dict[str, list[str]]:
    lines = text.split("\n")
    if not lines or lines[0] != FORMAT_VERSION:
        raise ModelFormatError(
            f"expected version line {FORMAT_VERSION!r}, got {lines[0]!r}")
    sections: dict[str, list[str]] = {}
    expected = list(SECTIONS)
    current = None
    for line in lines[1:]:
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if not expected or expected[0] != name:
                raise ModelFormatError(f"section {name!r} out of order")
            expected.pop(0)
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ModelFormatError(f"content before first section: {line!r}")
        current.append(line)
    if expected:
        raise ModelFormatError(f"missing sections: {expected}")
    return sections


def _parse_trie(lines: list[str], what: str) -> Trie:
    trie = Trie()
    for line in lines:
        fields = line.split()
        if len(fields) != 2:
            raise ModelFormatError(f"bad {what} line: {line!r}")
        trie.insert(fields[0], fields[1])
    return trie


def _parse_fst(lines: list[str],
               alphabet: TagAlphabet) -> SubsequentialTransducer:
    state_count = None
    initial = 0
    transitions: dict[tuple[int, str], tuple[int, tuple[str, ...]]] = {}
    final_output: dict[int, tuple[str, ...]] = {}
    for line in lines:
        fields = line.split()
        kind = fields[0]
        if kind == "state_count" and len(fields) == 2:
            state_count = int(fields[1])
        elif kind == "initial" and len(fields) == 2:
            initial = int(fields[1])
        elif kind == "final" and len(fields) >= 2:
            q = int(fields[1])
            out = tuple(fields[2:])
            final_output[q] = () if out == (EMPTY,) else out
        elif kind == "edge" and len(fields) == 5:
            p, a, out_token, q = fields[1], fields[2], fields[3], fields[4]
            out = () if out_token == EMPTY else tuple(out_token.split(","))
            transitions[(int(p), a)] = (int(q), out)
        else:
            raise ModelFormatError(f"bad FST line: {line!r}")
    if state_count is None:
        raise ModelFormatError("FST section missing state_count")
    return SubsequentialTransducer(state_count, transitions, final_output,
                                   alphabet.symbols, initial=initial)


def load_model(path: str) -> NerModel:
    with open(path, encoding="utf-8") as fh:
        sections = _split_sections(fh.read())

    symbols = sections["ALPHABET"]
    triggers = sections["TRIGGERS"]
    entity_types = []
    for sym in symbols:
        if sym.startswith("B-"):
            entity_types.append(sym[2:])
    alphabet = TagAlphabet(triggers=triggers, entity_types=entity_types)
    if list(alphabet.symbols) != symbols:
        raise ModelFormatError("alphabet section does not round-trip")

    lexical = LexicalModel(
        word_trie=_parse_trie(sections["LEXICON"], "lexicon"),
        suffix_trie=_parse_trie(sections["SUFFIX"], "suffix"),
        shape_trie=_parse_trie(sections["SHAPE"], "shape"),
        trigger_tags=dict(alphabet.trigger_tag_of))
    rules = [tbl.parse_rule_line(line) for line in sections["RULES"]]
    fst = _parse_fst(sections["FST"], alphabet)
    return NerModel(alphabet, lexical, rules, fst)
