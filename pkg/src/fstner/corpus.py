"""CoNLL-2002 corpus handling: parsing, emission, relabeling, splitting, scoring.

A corpus is a list of sentences; a sentence is a list of ``(surface, tag)``
pairs. Corpora are treated as immutable after construction and are safe to
read concurrently.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

Token = tuple[str, str]
Sentence = list[Token]
Corpus = list[Sentence]

PUNCT_TAG = "PUNCT"
TRIGGER_TAG_PREFIX = "TRIG_"
DEFAULT_TRIGGERS = ("de", "del", "en", "por", "según")
DEFAULT_ENTITY_TYPES = ("PER", "ORG", "LOC", "MISC")
OUTSIDE_TAG = "O"
DOCSTART = "-DOCSTART-"


class ConllFormatError(ValueError):
    """Raised on malformed CoNLL input (bad column count, unknown tag, ...)."""


class AlignmentError(ValueError):
    """Raised when two corpora are not aligned token for token."""


class TagAlphabet:
    """Ordered, finite tag set: BIO tags, PUNCT, one trigger tag per word.

    The ordering is fixed at construction and drives every tie-break in the
    toolkit, so two runs over the same data always agree.
    """

    def __init__(self,
                 triggers: Sequence[str] = DEFAULT_TRIGGERS,
                 entity_types: Sequence[str] = DEFAULT_ENTITY_TYPES):
        self.entity_types = tuple(entity_types)
        self.triggers = tuple(triggers)
        bio = []
        for etype in self.entity_types:
            bio.append(f"B-{etype}")
            bio.append(f"I-{etype}")
        bio.append(OUTSIDE_TAG)
        self.bio_tags = tuple(bio)
        self.trigger_tags = tuple(TRIGGER_TAG_PREFIX + w for w in self.triggers)
        self.symbols = self.bio_tags + (PUNCT_TAG,) + self.trigger_tags
        self.index = {sym: i for i, sym in enumerate(self.symbols)}
        if len(self.index) != len(self.symbols):
            raise ValueError("duplicate symbols in tag alphabet")
        self.trigger_tag_of = dict(zip(self.triggers, self.trigger_tags))

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, tag: str) -> bool:
        return tag in self.index

    def is_bio(self, tag: str) -> bool:
        return tag in self.bio_tags

    def is_entity_tag(self, tag: str) -> bool:
        """True for B-*/I-* tags (the phase-2 rule targets), not for O."""
        return tag in self.bio_tags and tag != OUTSIDE_TAG

    def is_trigger_tag(self, tag: str) -> bool:
        return tag.startswith(TRIGGER_TAG_PREFIX) and tag in self.index

    def output_tag(self, tag: str) -> str:
        """Map a residual special tag (PUNCT, TRIG_*) back to O for output."""
        if tag == PUNCT_TAG or tag.startswith(TRIGGER_TAG_PREFIX):
            return OUTSIDE_TAG
        return tag


def is_punctuation_token(token: str) -> bool:
    """A token counts as punctuation iff every character is in a Unicode P category."""
    return bool(token) and all(
        unicodedata.category(ch).startswith("P") for ch in token)


def parse_conll(text: str, valid_tags: Optional[Iterable[str]] = None) -> Corpus:
    """Parse CoNLL-2002 text: one ``token tag`` pair per line, blank line
    between sentences. ``-DOCSTART-`` lines are skipped.
    """
    if valid_tags is None:
        valid_tags = TagAlphabet().bio_tags
    known = frozenset(valid_tags)
    corpus: Corpus = []
    sentence: Sentence = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped:
            if sentence:
                corpus.append(sentence)
                sentence = []
            continue
        fields = stripped.split()
        if fields[0] == DOCSTART:
            continue
        if len(fields) != 2:
            raise ConllFormatError(
                f"line {lineno}: expected 'token tag', got {len(fields)} column(s)")
        surface, tag = fields
        if tag not in known:
            raise ConllFormatError(f"line {lineno}: unknown tag {tag!r}")
        sentence.append((surface, tag))
    if sentence:
        corpus.append(sentence)
    if not corpus:
        raise ConllFormatError("no sentences found")
    return corpus


def read_token_lines(text: str) -> list[list[str]]:
    """Lenient tokenized reader for tagging input: one token per line, an
    optional second column (an existing tag) is ignored. Returns sentences of
    surface tokens; an empty text yields an empty list.
    """
    sentences: list[list[str]] = []
    tokens: list[str] = []
    for line in text.split("\n"):
        stripped = line.strip()
        if not stripped:
            if tokens:
                sentences.append(tokens)
                tokens = []
            continue
        fields = stripped.split()
        if fields[0] == DOCSTART:
            continue
        tokens.append(fields[0])
    if tokens:
        sentences.append(tokens)
    return sentences


def write_conll(corpus: Corpus) -> str:
    """Inverse of parse_conll. Residual PUNCT/TRIG_* tags are emitted as O."""
    blocks = []
    for sentence in corpus:
        lines = []
        for surface, tag in sentence:
            if tag == PUNCT_TAG or tag.startswith(TRIGGER_TAG_PREFIX):
                tag = OUTSIDE_TAG
            lines.append(f"{surface} {tag}")
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def relabel_for_training(corpus: Corpus, alphabet: TagAlphabet) -> Corpus:
    """Copy of the corpus where O-tagged trigger words get their trigger tag
    and O-tagged punctuation gets PUNCT. Gold BIO tags are never overwritten:
    a trigger word inside an entity keeps its entity tag.
    """
    out: Corpus = []
    for sentence in corpus:
        relabeled: Sentence = []
        for surface, tag in sentence:
            if tag == OUTSIDE_TAG:
                if surface in alphabet.trigger_tag_of:
                    tag = alphabet.trigger_tag_of[surface]
                elif is_punctuation_token(surface):
                    tag = PUNCT_TAG
            relabeled.append((surface, tag))
        out.append(relabeled)
    return out


def split_corpus(corpus: Corpus, fraction: float) -> tuple[Corpus, Corpus]:
    """Deterministic sentence-granular prefix split; each part keeps at least
    one sentence.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    n = len(corpus)
    if n < 2:
        raise ValueError("corpus must contain at least 2 sentences to split")
    cut = math.ceil(fraction * n)
    cut = max(1, min(cut, n - 1))
    return corpus[:cut], corpus[cut:]


def bio_violations(corpus: Corpus) -> list[tuple[int, int, str]]:
    """Positions (sentence, token, tag) where an I-X tag has no preceding
    B-X/I-X of the same type. Used to warn about inconsistent gold data.
    """
    violations = []
    for si, sentence in enumerate(corpus):
        prev = OUTSIDE_TAG
        for ti, (_, tag) in enumerate(sentence):
            if tag.startswith("I-"):
                etype = tag[2:]
                if prev not in (f"B-{etype}", f"I-{etype}"):
                    violations.append((si, ti, tag))
            prev = tag
    return violations


def entity_spans(tags: Sequence[str]) -> list[tuple[str, int, int]]:
    """Maximal B-X (I-X)* spans as (type, start, end_exclusive).

    An I-X with no live same-type entity opens a new span, which mirrors the
    conlleval repair of orphan continuation tags.
    """
    spans: list[tuple[str, int, int]] = []
    start = None
    etype = None

    def close(end: int):
        nonlocal start, etype
        if etype is not None:
            spans.append((etype, start, end))
        start = etype = None

    for i, tag in enumerate(tags):
        if tag.startswith("B-"):
            close(i)
            start, etype = i, tag[2:]
        elif tag.startswith("I-"):
            if tag[2:] != etype:
                close(i)
                start, etype = i, tag[2:]
        else:
            close(i)
    close(len(tags))
    return spans


@dataclass(frozen=True)
class TypeScore:
    precision: float
    recall: float
    f1: float
    gold: int
    predicted: int
    correct: int


@dataclass(frozen=True)
class EvalReport:
    overall: TypeScore
    by_type: dict[str, TypeScore]
    token_count: int


def _score(gold: int, predicted: int, correct: int) -> TypeScore:
    p = correct / predicted if predicted else 0.0
    r = correct / gold if gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return TypeScore(p, r, f, gold, predicted, correct)


def evaluate(pred: Corpus, gold: Corpus) -> EvalReport:
    """Entity-level precision/recall/F1 with exact span-and-type matching."""
    if len(pred) != len(gold):
        raise AlignmentError(
            f"sentence count mismatch: {len(pred)} predicted vs {len(gold)} gold")
    gold_n: dict[str, int] = {}
    pred_n: dict[str, int] = {}
    correct_n: dict[str, int] = {}
    tokens = 0
    for si, (ps, gs) in enumerate(zip(pred, gold)):
        if len(ps) != len(gs):
            raise AlignmentError(
                f"sentence {si}: {len(ps)} predicted tokens vs {len(gs)} gold")
        tokens += len(gs)
        gold_spans = set(entity_spans([t for _, t in gs]))
        pred_spans = set(entity_spans([t for _, t in ps]))
        for etype, _, _ in gold_spans:
            gold_n[etype] = gold_n.get(etype, 0) + 1
        for etype, _, _ in pred_spans:
            pred_n[etype] = pred_n.get(etype, 0) + 1
        for etype, _, _ in gold_spans & pred_spans:
            correct_n[etype] = correct_n.get(etype, 0) + 1
    by_type = {
        etype: _score(gold_n.get(etype, 0), pred_n.get(etype, 0),
                      correct_n.get(etype, 0))
        for etype in sorted(set(gold_n) | set(pred_n))
    }
    overall = _score(sum(gold_n.values()), sum(pred_n.values()),
                     sum(correct_n.values()))
    return EvalReport(overall, by_type, tokens)


def format_report(report: EvalReport) -> str:
    """conlleval-style table, percentages with one decimal."""
    lines = ["         precision recall F1"]
    rows = list(report.by_type.items()) + [("overall", report.overall)]
    for name, s in rows:
        lines.append(f"{name:<12s} {100 * s.precision:6.1f} {100 * s.recall:6.1f}"
                     f" {100 * s.f1:6.1f}   ({s.correct}/{s.predicted} predicted,"
                     f" {s.gold} gold)")
    return "\n".join(lines)
