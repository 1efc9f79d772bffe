"""Lexical tagger: tries, shape encoding, training counts, fallback chain."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fstner.corpus import TagAlphabet
from fstner.lexical import (LexicalModel, Trie, shape_encode, suffix_key,
                            tag_sentence, tag_token, train_lexical)

ALPHA = TagAlphabet()


def test_shape_encode_mixed():
    assert shape_encode("Bogotá") == "Xxxxxx"
    assert shape_encode("IBM-2") == "XXX-d"
    assert shape_encode("según") == "xxxxx"


def test_shape_encode_passthrough():
    assert shape_encode("3,5%") == "d,d%"
    assert shape_encode("") == ""


class TestTrie:
    def test_insert_lookup(self):
        trie = Trie()
        trie.insert("de", "TRIG_de")
        assert trie.lookup("de") == "TRIG_de"

    def test_prefix_is_not_a_key(self):
        trie = Trie()
        trie.insert("casa", "O")
        assert trie.lookup("cas") is None
        assert trie.lookup("casas") is None

    def test_empty_trie(self):
        assert Trie().lookup("x") is None

    def test_reinsert_overwrites(self):
        trie = Trie()
        trie.insert("a", "O")
        trie.insert("a", "B-PER")
        assert trie.lookup("a") == "B-PER"
        assert len(trie) == 1

    def test_bulk_roundtrip_matches_dict(self):
        rng = random.Random(99)
        reference = {}
        trie = Trie()
        for _ in range(10_000):
            key = "".join(rng.choice("abcdeé") for _ in range(rng.randint(1, 8)))
            tag = rng.choice(ALPHA.symbols)
            reference[key] = tag
            trie.insert(key, tag)
        for key, tag in reference.items():
            assert trie.lookup(key) == tag
        assert len(trie) == len(reference)
        assert dict(trie.items()) == reference

    @given(st.dictionaries(st.text(min_size=1, max_size=6),
                           st.sampled_from(ALPHA.symbols), max_size=50))
    @settings(max_examples=50)
    def test_matches_mapping(self, mapping):
        trie = Trie()
        for key, tag in mapping.items():
            trie.insert(key, tag)
        for key, tag in mapping.items():
            assert trie.lookup(key) == tag


def corpus_of(*pairs):
    return [list(pairs)]


class TestTrainLexical:
    def test_word_argmax(self):
        corpus = [[("Madrid", "B-LOC")], [("Madrid", "B-LOC")],
                  [("Madrid", "B-LOC")], [("Madrid", "B-ORG")]]
        model = train_lexical(corpus, ALPHA)
        assert model.word_trie.lookup("Madrid") == "B-LOC"

    def test_single_token_corpus(self):
        model = train_lexical(corpus_of(("X", "B-PER")), ALPHA)
        assert model.word_trie.lookup("X") == "B-PER"
        assert model.suffix_trie.lookup(suffix_key("X")) == "B-PER"
        assert model.shape_trie.lookup("X") == "B-PER"

    def test_tie_breaks_by_alphabet_order(self):
        corpus = [[("x", "B-LOC")], [("x", "B-PER")]]
        model = train_lexical(corpus, ALPHA)
        # B-PER comes before B-LOC in the alphabet ordering
        assert model.word_trie.lookup("x") == "B-PER"

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            train_lexical([], ALPHA)

    def test_counts_match_oracle_on_random_corpus(self):
        rng = random.Random(4)
        vocab = ["casa", "Casa", "Madrid", "de", "perro", "gato", "Lima",
                 "X1", "muy", "tres"]
        corpus = []
        for _ in range(1000):
            corpus.append([(rng.choice(vocab), rng.choice(ALPHA.bio_tags))
                           for _ in range(rng.randint(1, 6))])
        model = train_lexical(corpus, ALPHA)

        def oracle(key_of):
            counts = {}
            for sent in corpus:
                for surface, tag in sent:
                    per = counts.setdefault(key_of(surface), {})
                    per[tag] = per.get(tag, 0) + 1
            return {
                key: min(per.items(),
                         key=lambda kv: (-kv[1], ALPHA.index[kv[0]]))[0]
                for key, per in counts.items()
            }

        assert dict(model.word_trie.items()) == oracle(lambda w: w)
        assert dict(model.suffix_trie.items()) == oracle(suffix_key)
        assert dict(model.shape_trie.items()) == oracle(shape_encode)


class _ForbiddenTrie(Trie):
    def lookup(self, key):
        raise AssertionError("fallback consulted after an earlier rule fired")


class TestTagToken:
    @pytest.fixture
    def model(self):
        corpus = [[("Madrid", "B-LOC"), ("come", "O"), ("pan", "O")],
                  [("Quixotea", "B-PER"), ("vive", "O")]]
        return train_lexical(corpus, ALPHA)

    def test_punctuation_first(self, model):
        assert tag_token(model, ",") == "PUNCT"
        assert tag_token(model, "...") == "PUNCT"
        assert tag_token(model, "¿?") == "PUNCT"

    def test_trigger_words(self, model):
        assert tag_token(model, "de") == "TRIG_de"
        assert tag_token(model, "según") == "TRIG_según"
        # trigger match is case-sensitive on the lowercase form
        assert tag_token(model, "De") != "TRIG_de"

    def test_known_word(self, model):
        assert tag_token(model, "Madrid") == "B-LOC"

    def test_suffix_fallback(self):
        model = LexicalModel(Trie(), Trie(), Trie())
        model.suffix_trie.insert(suffix_key("Quixotea"), "B-PER")
        assert tag_token(model, "Quixotea") == "B-PER"

    def test_shape_fallback(self):
        model = LexicalModel(Trie(), Trie(), Trie())
        model.shape_trie.insert("Xxx", "B-ORG")
        assert tag_token(model, "Foo") == "B-ORG"

    def test_default_tag(self):
        model = LexicalModel(Trie(), Trie(), Trie())
        assert tag_token(model, "zzz") == "O"

    def test_word_hit_short_circuits_fallbacks(self, model):
        instrumented = LexicalModel(model.word_trie, _ForbiddenTrie(),
                                    _ForbiddenTrie(),
                                    trigger_tags=model.trigger_tags)
        assert tag_token(instrumented, "Madrid") == "B-LOC"

    def test_total_and_deterministic(self, model):
        for token in ("a", "1", "œ", "-", "X9", "según", "", "想"):
            first = tag_token(model, token)
            assert first == tag_token(model, token)
            assert isinstance(first, str)

    def test_short_word_uses_whole_word_suffix(self):
        model = LexicalModel(Trie(), Trie(), Trie())
        model.suffix_trie.insert(suffix_key("ab"), "B-MISC")
        assert tag_token(model, "ab") == "B-MISC"


def test_tag_sentence_elementwise():
    corpus = [[("Madrid", "B-LOC"), ("gana", "O")]]
    model = train_lexical(corpus, ALPHA)
    tokens = ["Madrid", "gana", ",", "de"]
    assert tag_sentence(model, tokens) \
        == [tag_token(model, t) for t in tokens]
    assert tag_sentence(model, []) == []
