"""Trie-backed initial tagger: most-likely tag per word with suffix and
word-shape fallbacks for unknown words."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from fstner.corpus import (OUTSIDE_TAG, PUNCT_TAG, Corpus, TagAlphabet,
                           is_punctuation_token)

SUFFIX_LENGTH = 4

_LEAF = "\x00"  # never a key character: tokens are whitespace-split text


class Trie:
    """Character trie; lookup cost is proportional to key length."""

    def __init__(self):
        self._root: dict = {}
        self._size = 0

    def insert(self, key: str, value: str) -> None:
        node = self._root
        for ch in key:
            node = node.setdefault(ch, {})
        if _LEAF not in node:
            self._size += 1
        node[_LEAF] = value

    def lookup(self, key: str) -> Optional[str]:
        node = self._root
        for ch in key:
            node = node.get(ch)
            if node is None:
                return None
        return node.get(_LEAF)

    def __len__(self) -> int:
        return self._size

    def items(self) -> Iterator[tuple[str, str]]:
        stack = [("", self._root)]
        while stack:
            prefix, node = stack.pop()
            for ch, child in node.items():
                if ch == _LEAF:
                    yield prefix, child
                else:
                    stack.append((prefix + ch, child))


def shape_encode(word: str) -> str:
    """'X' for uppercase letters, 'x' for lowercase, 'd' for digits; anything
    else passes through. Unicode categories decide case."""
    out = []
    for ch in word:
        cat = unicodedata.category(ch)
        if cat in ("Lu", "Lt"):
            out.append("X")
        elif cat == "Ll":
            out.append("x")
        elif cat == "Nd":
            out.append("d")
        else:
            out.append(ch)
    return "".join(out)


def suffix_key(word: str) -> str:
    """Last min(4, len) characters, reversed so the trie shares structure
    from the word end."""
    return word[-SUFFIX_LENGTH:][::-1]


@dataclass
class LexicalModel:
    """Immutable after training; safe for concurrent reads."""

    word_trie: Trie
    suffix_trie: Trie
    shape_trie: Trie
    trigger_tags: dict[str, str] = field(default_factory=dict)
    default_tag: str = OUTSIDE_TAG
    punct_tag: str = PUNCT_TAG


def _argmax_tag(counts: dict[str, int], alphabet: TagAlphabet) -> str:
    # ties go to the smallest alphabet index, for run-to-run determinism
    best = None
    best_key = None
    for tag, n in counts.items():
        key = (-n, alphabet.index[tag])
        if best_key is None or key < best_key:
            best, best_key = tag, key
    return best


def train_lexical(corpus: Corpus, alphabet: TagAlphabet) -> LexicalModel:
    """Count (word, tag), (suffix, tag) and (shape, tag) pairs and keep the
    most frequent tag for each key."""
    if not corpus:
        raise ValueError("cannot train a lexical model on an empty corpus")
    word_counts: dict[str, dict[str, int]] = {}
    suffix_counts: dict[str, dict[str, int]] = {}
    shape_counts: dict[str, dict[str, int]] = {}
    for sentence in corpus:
        for surface, tag in sentence:
            if tag not in alphabet.index:
                raise ValueError(f"tag {tag!r} not in alphabet")
            for key, counts in ((surface, word_counts),
                                (suffix_key(surface), suffix_counts),
                                (shape_encode(surface), shape_counts)):
                per_tag = counts.setdefault(key, {})
                per_tag[tag] = per_tag.get(tag, 0) + 1

    model = LexicalModel(Trie(), Trie(), Trie(),
                         trigger_tags=dict(alphabet.trigger_tag_of))
    for counts, trie in ((word_counts, model.word_trie),
                         (suffix_counts, model.suffix_trie),
                         (shape_counts, model.shape_trie)):
        for key, per_tag in counts.items():
            trie.insert(key, _argmax_tag(per_tag, alphabet))
    return model


def tag_token(model: LexicalModel, token: str) -> str:
    """Decision chain: punctuation, trigger word, exact word, suffix, shape,
    default. Total over any token."""
    if is_punctuation_token(token):
        return model.punct_tag
    trigger = model.trigger_tags.get(token)
    if trigger is not None:
        return trigger
    tag = model.word_trie.lookup(token)
    if tag is not None:
        return tag
    tag = model.suffix_trie.lookup(suffix_key(token))
    if tag is not None:
        return tag
    tag = model.shape_trie.lookup(shape_encode(token))
    if tag is not None:
        return tag
    return model.default_tag


def tag_sentence(model: LexicalModel, tokens: Sequence[str]) -> list[str]:
    return [tag_token(model, tok) for tok in tokens]
